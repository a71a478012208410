#pragma once

#include "rmatch/conditions.hpp"
#include "rmatch/generators.hpp"
#include "rmatch/hypergraph.hpp"
#include "rmatch/lp.hpp"
#include "rmatch/matcher.hpp"
#include "rmatch/oracle.hpp"
#include "rmatch/rational.hpp"
