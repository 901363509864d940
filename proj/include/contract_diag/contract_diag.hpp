#pragma once

#include "contract_diag/composition.hpp"
#include "contract_diag/contract.hpp"
#include "contract_diag/diagnostics.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/graph.hpp"
#include "contract_diag/harness.hpp"
#include "contract_diag/system_io.hpp"
#include "contract_diag/theory.hpp"
