#pragma once

#include "realeq/errors.hpp"
#include "realeq/extreal.hpp"
#include "realeq/expr.hpp"
#include "realeq/simplify.hpp"
#include "realeq/normal_form.hpp"
#include "realeq/solver.hpp"
#include "realeq/res.hpp"
#include "realeq/oracle.hpp"
#include "realeq/modal.hpp"
#include "realeq/bes.hpp"
#include "realeq/syntax.hpp"
