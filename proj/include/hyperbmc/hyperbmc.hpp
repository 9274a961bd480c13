// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hyperbmc/bdd.hpp"
#include "hyperbmc/circuit.hpp"
#include "hyperbmc/driver.hpp"
#include "hyperbmc/encoder.hpp"
#include "hyperbmc/error.hpp"
#include "hyperbmc/external.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/kripke.hpp"
#include "hyperbmc/models.hpp"
#include "hyperbmc/oracle.hpp"
#include "hyperbmc/qbf.hpp"
#include "hyperbmc/qcir.hpp"
#include "hyperbmc/report.hpp"
#include "hyperbmc/semantics.hpp"
