#pragma once

#include "satcycles/error.hpp"
#include "satcycles/model.hpp"
#include "satcycles/exactflow.hpp"
#include "satcycles/poincare.hpp"
#include "satcycles/crossings.hpp"
#include "satcycles/melnikov.hpp"
#include "satcycles/csv.hpp"
#include "satcycles/commands.hpp"
