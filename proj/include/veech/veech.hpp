#pragma once

#include "errors.hpp"
#include "exact.hpp"
#include "hyperlog.hpp"
#include "kz_connection.hpp"
#include "local_frobenius.hpp"
#include "monodromy_rep.hpp"
#include "monomial.hpp"
#include "numeric.hpp"
#include "ode.hpp"
#include "operator_algebra.hpp"
#include "path.hpp"
#include "transport.hpp"
#include "version.hpp"
