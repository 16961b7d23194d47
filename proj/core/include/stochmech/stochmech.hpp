#pragma once

#include "stochmech/errors.hpp"
#include "stochmech/grid_fields.hpp"
#include "stochmech/array_io.hpp"
#include "stochmech/schrodinger.hpp"
#include "stochmech/madelung.hpp"
#include "stochmech/action_functionals.hpp"
#include "stochmech/nelson_sde.hpp"
#include "stochmech/competitors.hpp"
#include "stochmech/benamou_brenier.hpp"
