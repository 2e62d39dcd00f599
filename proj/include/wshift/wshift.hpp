#pragma once

#include "types.hpp"
#include "log2_value.hpp"
#include "format.hpp"
#include "weights.hpp"
#include "report.hpp"
#include "products.hpp"
#include "shifts.hpp"
#include "analysis.hpp"
#include "witnesses.hpp"
