#pragma once

namespace contract_diag {

/// Refinement strengthens a term (result and context imply the original);
/// relaxation weakens it (original and context imply the result).
enum class Direction { refinement, relaxation };

}  // namespace contract_diag
