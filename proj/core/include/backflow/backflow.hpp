#pragma once

#include "backflow/classical.hpp"
#include "backflow/conventions.hpp"
#include "backflow/dressed_flux.hpp"
#include "backflow/eigensolver.hpp"
#include "backflow/errors.hpp"
#include "backflow/evolution.hpp"
#include "backflow/flux_forms.hpp"
#include "backflow/matrix.hpp"
#include "backflow/numeric_format.hpp"
#include "backflow/parallel.hpp"
#include "backflow/potential.hpp"
#include "backflow/quadrature.hpp"
#include "backflow/scattering.hpp"
#include "backflow/spectra.hpp"
#include "backflow/version.hpp"
