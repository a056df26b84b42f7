#pragma once

#include "causalmk/axioms.hpp"
#include "causalmk/cause.hpp"
#include "causalmk/error.hpp"
#include "causalmk/formula.hpp"
#include "causalmk/model.hpp"
#include "causalmk/model_file.hpp"
#include "causalmk/parser.hpp"
#include "causalmk/query.hpp"
#include "causalmk/semantics.hpp"
#include "causalmk/sufficiency.hpp"
