#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace wfsim {

using Cx = std::complex<double>;

// ── numerical tolerances ──────────────────────────────────────────────────
// 1e-10 for invariant checks (unitarity, hermiticity, norms), 1e-12 for
// exact-identity assertions on doubles.  Both leave headroom above the
// accumulation error reachable at dimension 324.
constexpr double kInvariantTol = 1e-10;
constexpr double kExactTol = 1e-12;

// ── composite space ───────────────────────────────────────────────────────
// Six factors in a fixed order: two system qubits S1, S2 and four memory
// registers C, D, A, B (one qutrit per observer).  Amplitudes flatten
// row-major over this order, S1 most significant.
enum class Factor { S1, S2, C, D, A, B };

constexpr int kNumFactors = 6;

// Register (qutrit) basis convention: Ready=0, SawUp=1, SawDown=2.  The
// ready state must stay distinguishable from both outcome records, or undo
// (erasure) semantics would not be representable.
constexpr int kReady = 0;
constexpr int kSawUp = 1;
constexpr int kSawDown = 2;

int factor_dim(Factor f);           // 2 for S1/S2, 3 for the registers
const char* factor_name(Factor f);  // "S1", "S2", "C", "D", "A", "B"

struct FactorSpec {
    Factor label;
    int dimension;
};

class CompositeSpace;
using SpacePtr = std::shared_ptr<const CompositeSpace>;

class CompositeSpace {
public:
    // Factors must have unique labels and dimensions in {2, 3}.
    explicit CompositeSpace(std::vector<FactorSpec> factors);

    const std::vector<FactorSpec>& factors() const { return factors_; }
    int total_dim() const { return total_dim_; }

    // Position of a factor in the fixed order; throws on unknown label.
    int position(Factor f) const;
    int dim(Factor f) const;
    // Row-major stride: amplitude-index step when this factor's basis index
    // increments by one.
    int stride(Factor f) const;

    bool same_layout(const CompositeSpace& other) const;

private:
    std::vector<FactorSpec> factors_;
    std::vector<int> strides_;
    int total_dim_ = 0;
};

// The canonical six-factor space [S1:2, S2:2, C:3, D:3, A:3, B:3] with
// total dimension 324.  Returns a shared singleton so kets built at
// independent call sites agree on layout identity.
SpacePtr make_canonical_space();

// ── states ────────────────────────────────────────────────────────────────
// Immutable by convention: operations return new kets.

struct Ket {
    SpacePtr space;
    std::vector<Cx> amplitudes;

    double norm_sq() const;
    double norm() const;
};

// Flattened row-major index for per-factor basis indices (one index per
// factor, listed in the space's factor order).
int flat_index(const CompositeSpace& space, const std::vector<int>& indices);

// Unit vector |i₁ i₂ … i₆⟩ with amplitude 1 at the flattened index.
Ket basis_ket(const SpacePtr& space, const std::vector<int>& indices);

// ── operators ─────────────────────────────────────────────────────────────

// Operator on an ordered subset of factors.  The matrix is row-major over
// the product of target dimensions, first target most significant.  When
// unitary is requested, ‖M†M − I‖_max ≤ 1e-10 is verified on construction.
struct LocalOperator {
    std::vector<Factor> targets;
    std::vector<Cx> matrix;
    bool unitary_flag = false;
    int dim = 0;

    LocalOperator(std::vector<Factor> targets_in, std::vector<Cx> matrix_in,
                  bool unitary);
};

// ‖M†M − I‖_max for a dim×dim row-major matrix.
double unitarity_error(const std::vector<Cx>& m, int dim);
// ‖M − M†‖_max.
double hermiticity_error(const std::vector<Cx>& m, int dim);

// Kronecker product on disjoint target sets; the first operator's targets
// become the most significant digits of the combined index.
LocalOperator tensor(const LocalOperator& a, const LocalOperator& b);

// Full-space operator acting as op on its targets and as identity elsewhere.
// Materializes the total_dim × total_dim matrix — oracle/test use only; the
// hot path is the strided apply below.
LocalOperator embed(const LocalOperator& op, const CompositeSpace& space);

// Matrix action on the ket.  Strides over the non-target factors, so a local
// operator costs total_dim × dim multiplies instead of total_dim².
Ket apply(const LocalOperator& op, const Ket& ket);

// ⟨a|b⟩, conjugate-linear in the first argument.
Cx inner(const Ket& a, const Ket& b);

// ⟨ψ|O|ψ⟩ for Hermitian O.  Throws if O fails the hermiticity check; the
// imaginary residual must stay below 1e-10 and is then discarded.
double expectation(const LocalOperator& obs, const Ket& ket);

}  // namespace wfsim
