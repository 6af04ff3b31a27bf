#pragma once

#include "qunity/ast.hpp"
#include "qunity/circuit.hpp"
#include "qunity/classical.hpp"
#include "qunity/error.hpp"
#include "qunity/expand.hpp"
#include "qunity/iso.hpp"
#include "qunity/lower.hpp"
#include "qunity/matrix.hpp"
#include "qunity/parse.hpp"
#include "qunity/print.hpp"
#include "qunity/real.hpp"
#include "qunity/semantics.hpp"
#include "qunity/surface.hpp"
#include "qunity/typecheck.hpp"
#include "qunity/validate.hpp"
#include "qunity/verify.hpp"
