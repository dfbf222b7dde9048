#pragma once

#include "error.hpp"
#include "scalar.hpp"
#include "multi_index.hpp"
#include "poly.hpp"
#include "linalg.hpp"
#include "jet.hpp"
#include "arrow.hpp"
#include "random.hpp"
#include "spencer.hpp"
#include "lie_algebra.hpp"
#include "forms.hpp"
#include "lie_equations.hpp"
#include "klein.hpp"
