#include "wfsim/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wfsim {

int factor_dim(Factor f) {
    switch (f) {
        case Factor::S1:
        case Factor::S2: return 2;
        case Factor::C:
        case Factor::D:
        case Factor::A:
        case Factor::B: return 3;
    }
    throw std::invalid_argument("factor_dim: unknown factor label");
}

const char* factor_name(Factor f) {
    switch (f) {
        case Factor::S1: return "S1";
        case Factor::S2: return "S2";
        case Factor::C: return "C";
        case Factor::D: return "D";
        case Factor::A: return "A";
        case Factor::B: return "B";
    }
    return "?";
}

// ── CompositeSpace ────────────────────────────────────────────────────────

CompositeSpace::CompositeSpace(std::vector<FactorSpec> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty())
        throw std::invalid_argument("CompositeSpace: factor list is empty");
    total_dim_ = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const FactorSpec& f = factors_[i];
        if (f.dimension != 2 && f.dimension != 3)
            throw std::invalid_argument("CompositeSpace: factor dimension must be 2 or 3");
        for (std::size_t j = 0; j < i; ++j)
            if (factors_[j].label == f.label)
                throw std::invalid_argument(std::string("CompositeSpace: duplicate factor label ") +
                                            factor_name(f.label));
        total_dim_ *= f.dimension;
    }
    // Row-major strides: the last factor varies fastest.
    strides_.assign(factors_.size(), 1);
    for (int i = static_cast<int>(factors_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * factors_[i + 1].dimension;
}

int CompositeSpace::position(Factor f) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label == f) return static_cast<int>(i);
    throw std::invalid_argument(std::string("CompositeSpace: unknown factor label ") +
                                factor_name(f));
}

int CompositeSpace::dim(Factor f) const { return factors_[position(f)].dimension; }

int CompositeSpace::stride(Factor f) const { return strides_[position(f)]; }

bool CompositeSpace::same_layout(const CompositeSpace& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != other.factors_[i].label ||
            factors_[i].dimension != other.factors_[i].dimension)
            return false;
    return true;
}

SpacePtr make_canonical_space() {
    static const SpacePtr space = std::make_shared<const CompositeSpace>(
        std::vector<FactorSpec>{{Factor::S1, 2},
                                {Factor::S2, 2},
                                {Factor::C, 3},
                                {Factor::D, 3},
                                {Factor::A, 3},
                                {Factor::B, 3}});
    return space;
}

// ── states ────────────────────────────────────────────────────────────────

double Ket::norm_sq() const {
    double n = 0.0;
    for (const Cx& a : amplitudes) n += std::norm(a);
    return n;
}

double Ket::norm() const { return std::sqrt(norm_sq()); }

int flat_index(const CompositeSpace& space, const std::vector<int>& indices) {
    const auto& factors = space.factors();
    if (indices.size() != factors.size())
        throw std::invalid_argument("flat_index: one basis index per factor required");
    int idx = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= factors[i].dimension)
            throw std::out_of_range(std::string("flat_index: basis index out of range for factor ") +
                                    factor_name(factors[i].label));
        idx = idx * factors[i].dimension + indices[i];
    }
    return idx;
}

Ket basis_ket(const SpacePtr& space, const std::vector<int>& indices) {
    if (!space) throw std::invalid_argument("basis_ket: null space");
    Ket k{space, std::vector<Cx>(space->total_dim(), Cx{0.0, 0.0})};
    k.amplitudes[flat_index(*space, indices)] = Cx{1.0, 0.0};
    return k;
}

// ── operators ─────────────────────────────────────────────────────────────

LocalOperator::LocalOperator(std::vector<Factor> targets_in, std::vector<Cx> matrix_in,
                             bool unitary)
    : targets(std::move(targets_in)), matrix(std::move(matrix_in)), unitary_flag(unitary) {
    if (targets.empty())
        throw std::invalid_argument("LocalOperator: target list is empty");
    dim = 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (targets[j] == targets[i])
                throw std::invalid_argument("LocalOperator: duplicate target factor");
        dim *= factor_dim(targets[i]);
    }
    if (matrix.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("LocalOperator: matrix size does not match target dimensions");
    if (unitary_flag && unitarity_error(matrix, dim) > kInvariantTol)
        throw std::invalid_argument("LocalOperator: matrix fails the unitarity check");
}

double unitarity_error(const std::vector<Cx>& m, int dim) {
    double max_err = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            Cx sum{0.0, 0.0};
            for (int k = 0; k < dim; ++k)
                sum += std::conj(m[static_cast<std::size_t>(k) * dim + i]) *
                       m[static_cast<std::size_t>(k) * dim + j];
            const double expected = (i == j) ? 1.0 : 0.0;
            max_err = std::max(max_err, std::abs(sum - Cx{expected, 0.0}));
        }
    }
    return max_err;
}

double hermiticity_error(const std::vector<Cx>& m, int dim) {
    double max_err = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            max_err = std::max(max_err,
                               std::abs(m[static_cast<std::size_t>(i) * dim + j] -
                                        std::conj(m[static_cast<std::size_t>(j) * dim + i])));
    return max_err;
}

LocalOperator tensor(const LocalOperator& a, const LocalOperator& b) {
    for (Factor t : a.targets)
        for (Factor u : b.targets)
            if (t == u)
                throw std::invalid_argument("tensor: operators share a target factor");
    const int da = a.dim, db = b.dim, d = da * db;
    std::vector<Factor> targets = a.targets;
    targets.insert(targets.end(), b.targets.begin(), b.targets.end());
    std::vector<Cx> m(static_cast<std::size_t>(d) * d);
    for (int ia = 0; ia < da; ++ia)
        for (int ja = 0; ja < da; ++ja) {
            const Cx va = a.matrix[static_cast<std::size_t>(ia) * da + ja];
            for (int ib = 0; ib < db; ++ib)
                for (int jb = 0; jb < db; ++jb)
                    m[static_cast<std::size_t>(ia * db + ib) * d + (ja * db + jb)] =
                        va * b.matrix[static_cast<std::size_t>(ib) * db + jb];
        }
    return LocalOperator(std::move(targets), std::move(m), a.unitary_flag && b.unitary_flag);
}

namespace {

// Amplitude-index offsets of the operator's target-digit combinations and of
// the complementary ("rest") factor combinations, shared by embed and apply.
struct TargetLayout {
    std::vector<int> offsets;       // one per target-digit combination (size op.dim)
    std::vector<int> rest_dims;     // dimensions of non-target factors
    std::vector<int> rest_strides;  // strides of non-target factors
    int rest_count = 1;             // product of rest_dims
};

TargetLayout make_layout(const LocalOperator& op, const CompositeSpace& space) {
    TargetLayout lay;
    std::vector<int> tdims, tstrides;
    tdims.reserve(op.targets.size());
    tstrides.reserve(op.targets.size());
    for (Factor f : op.targets) {
        tdims.push_back(space.dim(f));        // throws on unknown target label
        tstrides.push_back(space.stride(f));
    }
    lay.offsets.resize(op.dim);
    for (int j = 0; j < op.dim; ++j) {
        int rem = j, off = 0;
        for (int k = static_cast<int>(tdims.size()) - 1; k >= 0; --k) {
            off += (rem % tdims[k]) * tstrides[k];
            rem /= tdims[k];
        }
        lay.offsets[j] = off;
    }
    for (const FactorSpec& fs : space.factors()) {
        if (std::find(op.targets.begin(), op.targets.end(), fs.label) != op.targets.end())
            continue;
        lay.rest_dims.push_back(fs.dimension);
        lay.rest_strides.push_back(space.stride(fs.label));
        lay.rest_count *= fs.dimension;
    }
    return lay;
}

// Iterates the mixed-radix counter over the rest factors, invoking fn(base)
// with the amplitude-index base of each combination.
template <typename Fn>
void for_each_rest_base(const TargetLayout& lay, Fn&& fn) {
    std::vector<int> digit(lay.rest_dims.size(), 0);
    for (int r = 0; r < lay.rest_count; ++r) {
        int base = 0;
        for (std::size_t k = 0; k < digit.size(); ++k) base += digit[k] * lay.rest_strides[k];
        fn(base);
        for (int k = static_cast<int>(digit.size()) - 1; k >= 0; --k) {
            if (++digit[k] < lay.rest_dims[k]) break;
            digit[k] = 0;
        }
    }
}

}  // namespace

LocalOperator embed(const LocalOperator& op, const CompositeSpace& space) {
    const TargetLayout lay = make_layout(op, space);
    const int n = space.total_dim();
    const int m = op.dim;
    std::vector<Cx> full(static_cast<std::size_t>(n) * n, Cx{0.0, 0.0});
    for_each_rest_base(lay, [&](int base) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                full[static_cast<std::size_t>(base + lay.offsets[i]) * n +
                     (base + lay.offsets[j])] = op.matrix[static_cast<std::size_t>(i) * m + j];
    });
    std::vector<Factor> all_targets;
    all_targets.reserve(space.factors().size());
    for (const FactorSpec& fs : space.factors()) all_targets.push_back(fs.label);
    return LocalOperator(std::move(all_targets), std::move(full), op.unitary_flag);
}

Ket apply(const LocalOperator& op, const Ket& ket) {
    if (!ket.space) throw std::invalid_argument("apply: ket has no space");
    const CompositeSpace& sp = *ket.space;
    if (ket.amplitudes.size() != static_cast<std::size_t>(sp.total_dim()))
        throw std::invalid_argument("apply: amplitude count does not match the space");
    const TargetLayout lay = make_layout(op, sp);
    const int m = op.dim;
    Ket out{ket.space, std::vector<Cx>(sp.total_dim())};
    std::vector<Cx> in(m);
    for_each_rest_base(lay, [&](int base) {
        for (int j = 0; j < m; ++j) in[j] = ket.amplitudes[base + lay.offsets[j]];
        for (int i = 0; i < m; ++i) {
            const Cx* row = &op.matrix[static_cast<std::size_t>(i) * m];
            Cx s{0.0, 0.0};
            for (int j = 0; j < m; ++j) s += row[j] * in[j];
            out.amplitudes[base + lay.offsets[i]] = s;
        }
    });
    return out;
}

Cx inner(const Ket& a, const Ket& b) {
    if (!a.space || !b.space || !a.space->same_layout(*b.space))
        throw std::invalid_argument("inner: kets live in different spaces");
    if (a.amplitudes.size() != b.amplitudes.size())
        throw std::invalid_argument("inner: amplitude count mismatch");
    Cx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
        s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return s;
}

double expectation(const LocalOperator& obs, const Ket& ket) {
    if (hermiticity_error(obs.matrix, obs.dim) > kInvariantTol)
        throw std::invalid_argument("expectation: operator is not Hermitian");
    const Cx value = inner(ket, apply(obs, ket));
    if (std::abs(value.imag()) > kInvariantTol)
        throw std::logic_error("expectation: imaginary residual exceeds tolerance");
    return value.real();
}

}  // namespace wfsim
