#pragma once

#include "sqlift/core.hpp"
#include "sqlift/lp.hpp"
#include "sqlift/qp.hpp"
#include "sqlift/polyhedron.hpp"
#include "sqlift/polyfunc.hpp"
#include "sqlift/reparam.hpp"
#include "sqlift/second_order.hpp"
#include "sqlift/kl_lab.hpp"
#include "sqlift/first_order.hpp"
#include "sqlift/oracles.hpp"
#include "sqlift/generators.hpp"
#include "sqlift/io.hpp"
#include "sqlift/selftest.hpp"
