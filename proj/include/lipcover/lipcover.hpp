#pragma once

#include "lipcover/algorithms.hpp"
#include "lipcover/approximants.hpp"
#include "lipcover/benchmarks.hpp"
#include "lipcover/geometry.hpp"
#include "lipcover/mountaincar.hpp"
#include "lipcover/oracle.hpp"
#include "lipcover/problem.hpp"
#include "lipcover/projection.hpp"
#include "lipcover/subsolver.hpp"
#include "lipcover/trace_io.hpp"
