#pragma once

#include "iss/common.hpp"
#include "iss/dag.hpp"
#include "iss/geometry.hpp"
#include "iss/io.hpp"
#include "iss/multitest.hpp"
#include "iss/pvalues.hpp"
#include "iss/rng.hpp"
#include "iss/scenarios.hpp"
#include "iss/select.hpp"
#include "iss/special_functions.hpp"
#include "iss/split.hpp"
#include "iss/study.hpp"
#include "iss/transforms.hpp"
