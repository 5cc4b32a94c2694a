#pragma once

// Exact computer algebra for totally decomposable algebras with orthogonal
// involution over characteristic-2 rational function fields.

#include "invol2/algebra.hpp"
#include "invol2/errors.hpp"
#include "invol2/field.hpp"
#include "invol2/forms.hpp"
#include "invol2/frobenius.hpp"
#include "invol2/gf2poly.hpp"
#include "invol2/involution.hpp"
#include "invol2/linalg.hpp"
#include "invol2/scenario.hpp"
#include "invol2/structure.hpp"
#include "invol2/verify.hpp"
#include "invol2/version.hpp"
