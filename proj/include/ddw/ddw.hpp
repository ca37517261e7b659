#pragma once

#include "ddw/numeric.hpp"
#include "ddw/parser.hpp"
#include "ddw/render.hpp"
