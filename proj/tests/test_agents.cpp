#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "test_helpers.hpp"
#include "wfsim/agents.hpp"
#include "wfsim/qstate.hpp"
#include "wfsim/rng.hpp"

using namespace wfsim;
using testing::distance;
using testing::random_angle;
using testing::random_ket;

namespace {

const SpacePtr& space() {
    static SpacePtr s = make_canonical_space();
    return s;
}

Ket zero_ket() {
    return Ket{space(), std::vector<Cx>(324)};
}

// |s⟩_S1 ⊗ |r⟩_C with everything else in its 0 state.
int s1c_index(int s, int r) {
    return flat_index(*space(), {s, 0, r, 0, 0, 0});
}

// (α|↑⟩ + β|↓⟩)_S1 ⊗ |Ready⟩_C, rest fixed.
Ket spin_ready(Cx alpha, Cx beta) {
    Ket psi = zero_ket();
    psi.amplitudes[size_t(s1c_index(0, kReady))] = alpha;
    psi.amplitudes[size_t(s1c_index(1, kReady))] = beta;
    return psi;
}

Ket singlet() {
    Ket psi = zero_ket();
    const double s = 1.0 / std::sqrt(2.0);
    psi.amplitudes[size_t(flat_index(*space(), {0, 1, 0, 0, 0, 0}))] = s;
    psi.amplitudes[size_t(flat_index(*space(), {1, 0, 0, 0, 0, 0}))] = -s;
    return psi;
}

}  // namespace

TEST_CASE("Angle normalizes into [0, 2pi) and rejects non-finite input") {
    const double two_pi = 2.0 * M_PI;
    CHECK(Angle(0.5).radians() == 0.5);
    CHECK(Angle(0.5 + two_pi).radians() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(Angle(-0.5).radians() == doctest::Approx(two_pi - 0.5).epsilon(1e-14));
    CHECK(Angle(two_pi).radians() == 0.0);
    CHECK(Angle(0.0).radians() == 0.0);
    CHECK_THROWS_AS(Angle{std::nan("")}, std::invalid_argument);
    CHECK_THROWS_AS(Angle{std::numeric_limits<double>::infinity()}, std::invalid_argument);
}

TEST_CASE("agent wiring: systems, registers, partners") {
    CHECK(system_of(AgentId::Carol) == Factor::S1);
    CHECK(system_of(AgentId::Alice) == Factor::S1);
    CHECK(system_of(AgentId::Dan) == Factor::S2);
    CHECK(system_of(AgentId::Bob) == Factor::S2);
    CHECK(register_of(AgentId::Carol) == Factor::C);
    CHECK(register_of(AgentId::Dan) == Factor::D);
    CHECK(register_of(AgentId::Alice) == Factor::A);
    CHECK(register_of(AgentId::Bob) == Factor::B);
    CHECK(partner_friend(AgentId::Alice) == AgentId::Carol);
    CHECK(partner_friend(AgentId::Bob) == AgentId::Dan);
    CHECK_THROWS_AS(partner_friend(AgentId::Carol), std::invalid_argument);
    CHECK(is_friend_agent(AgentId::Carol));
    CHECK(is_friend_agent(AgentId::Dan));
    CHECK(is_superobserver(AgentId::Alice));
    CHECK(is_superobserver(AgentId::Bob));

    CHECK(outcome_value(Outcome::Plus) == 1.0);
    CHECK(outcome_value(Outcome::Minus) == -1.0);
    CHECK(outcome_value(Outcome::Ready) == 0.0);
    CHECK(outcome_value(Outcome::Ready, -0.5) == -0.5);
}

TEST_CASE("spin observable interpolates sigma_z to sigma_x") {
    const LocalOperator z = spin_observable(Angle(0.0));
    CHECK(z.matrix == std::vector<Cx>{1, 0, 0, -1});

    const LocalOperator x = spin_observable(Angle(M_PI / 2));
    CHECK(std::abs(x.matrix[0]) < kExactTol);
    CHECK(std::abs(x.matrix[1] - Cx(1.0)) < kExactTol);
    CHECK(std::abs(x.matrix[2] - Cx(1.0)) < kExactTol);
    CHECK(std::abs(x.matrix[3]) < kExactTol);

    RngStream rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const double theta = random_angle(rng).radians();
        const LocalOperator m = spin_observable(Angle(theta));
        CHECK(hermiticity_error(m.matrix, m.dim) < kExactTol);
        // σ(θ)² = I, so eigenvalues are ±1.
        CHECK(unitarity_error(m.matrix, m.dim) < kInvariantTol);

        // Pinned eigenvector convention.
        const Cx up0 = std::cos(theta / 2), up1 = std::sin(theta / 2);
        const Cx r0 = m.matrix[0] * up0 + m.matrix[1] * up1;
        const Cx r1 = m.matrix[2] * up0 + m.matrix[3] * up1;
        CHECK(std::abs(r0 - up0) < kInvariantTol);
        CHECK(std::abs(r1 - up1) < kInvariantTol);
    }
}

TEST_CASE("friend dilation maps eigenvectors to recorded eigenvectors") {
    RngStream rng(7);
    for (double theta : {0.0, M_PI / 4, 1.0, M_PI / 2, 4.0}) {
        const LocalOperator u = friend_unitary(AgentId::Carol, Angle(theta));
        CHECK(u.targets == std::vector<Factor>{Factor::S1, Factor::C});

        const Cx c = std::cos(theta / 2), s = std::sin(theta / 2);

        // |↑_θ⟩⊗|Ready⟩ → |↑_θ⟩⊗|SawUp⟩
        const Ket up = apply(u, spin_ready(c, s));
        CHECK(std::abs(up.amplitudes[size_t(s1c_index(0, kSawUp))] - c) < kInvariantTol);
        CHECK(std::abs(up.amplitudes[size_t(s1c_index(1, kSawUp))] - s) < kInvariantTol);
        CHECK(std::abs(up.norm() - 1.0) < kInvariantTol);

        // |↓_θ⟩⊗|Ready⟩ → |↓_θ⟩⊗|SawDown⟩
        const Ket dn = apply(u, spin_ready(-s, c));
        CHECK(std::abs(dn.amplitudes[size_t(s1c_index(0, kSawDown))] + s) < kInvariantTol);
        CHECK(std::abs(dn.amplitudes[size_t(s1c_index(1, kSawDown))] - c) < kInvariantTol);

        // Linearity: the SawUp component of U(ψ⊗Ready) is ⟨↑_θ|ψ⟩ |↑_θ⟩.
        const Cx alpha(rng.next_double() - 0.5, rng.next_double() - 0.5);
        const Cx beta(rng.next_double() - 0.5, rng.next_double() - 0.5);
        const Ket mixed = apply(u, spin_ready(alpha, beta));
        const Cx overlap = std::conj(c) * alpha + std::conj(s) * beta;
        CHECK(std::abs(mixed.amplitudes[size_t(s1c_index(0, kSawUp))] - overlap * c) <
              kInvariantTol);
        CHECK(std::abs(mixed.amplitudes[size_t(s1c_index(1, kSawUp))] - overlap * s) <
              kInvariantTol);
    }
}

TEST_CASE("dilations are involutions and commute across laboratories") {
    RngStream rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Angle theta = random_angle(rng);
        const Ket psi = random_ket(space(), rng);

        const LocalOperator uc = friend_unitary(AgentId::Carol, theta);
        CHECK(distance(apply(uc, apply(uc, psi)), psi) < kInvariantTol);

        const LocalOperator ud = friend_unitary(AgentId::Dan, random_angle(rng));
        CHECK(distance(apply(uc, apply(ud, psi)), apply(ud, apply(uc, psi))) <
              kInvariantTol);

        const LocalOperator ua = super_unitary(AgentId::Alice, theta);
        const LocalOperator ub = super_unitary(AgentId::Bob, random_angle(rng));
        CHECK(distance(apply(ua, apply(ub, psi)), apply(ub, apply(ua, psi))) <
              kInvariantTol);
    }
}

TEST_CASE("dilation constructors enforce roles") {
    CHECK_THROWS_AS(friend_unitary(AgentId::Alice, Angle(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(friend_unitary(AgentId::Bob, Angle(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(super_unitary(AgentId::Carol, Angle(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(super_unitary(AgentId::Dan, Angle(0.0)), std::invalid_argument);

    const LocalOperator ub = super_unitary(AgentId::Bob, Angle(1.0));
    CHECK(ub.targets == std::vector<Factor>{Factor::S2, Factor::B});
}

TEST_CASE("projective spin measurement: Born weights, collapse, idempotence") {
    RngStream rng(13);

    SUBCASE("deterministic on an eigenstate") {
        const Ket up = spin_ready(1.0, 0.0);
        auto [outcome, post] = projective_measure(up, Factor::S1,
                                                  spin_observable(Angle(0.0)), rng);
        CHECK(outcome == Outcome::Plus);
        CHECK(distance(post, up) < kInvariantTol);
    }

    SUBCASE("branch weights approach cos^2(theta/2)") {
        const double theta = 1.1;
        const LocalOperator obs = spin_observable(Angle(theta));
        int plus = 0;
        const int n = 2000;
        for (int i = 0; i < n; ++i) {
            RngStream child = RngStream(13).child(std::uint64_t(i));
            auto [outcome, post] = projective_measure(spin_ready(1.0, 0.0), Factor::S1,
                                                      obs, child);
            if (outcome == Outcome::Plus) ++plus;
        }
        const double p = std::cos(theta / 2) * std::cos(theta / 2);
        const double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(double(plus) / n - p) < 5 * sigma);
    }

    SUBCASE("singlet anticorrelation at equal angles") {
        for (int trial = 0; trial < 50; ++trial) {
            const Angle theta = random_angle(rng);
            auto [o1, mid] = projective_measure(singlet(), Factor::S1,
                                                spin_observable(theta, Factor::S1), rng);
            auto [o2, post] = projective_measure(mid, Factor::S2,
                                                 spin_observable(theta, Factor::S2), rng);
            CHECK(o1 != o2);
            CHECK(std::abs(post.norm() - 1.0) < kInvariantTol);

            // Repeating the same measurement reproduces the outcome.
            auto [o3, same] = projective_measure(post, Factor::S2,
                                                 spin_observable(theta, Factor::S2), rng);
            CHECK(o3 == o2);
            CHECK(distance(same, post) < kInvariantTol);
        }
    }

    SUBCASE("non-involutory observable is rejected") {
        // 2×2 Hermitian with eigenvalues {2, 0}: not ±1-valued.
        const LocalOperator bad({Factor::S1}, {Cx(1), Cx(1), Cx(1), Cx(1)}, false);
        CHECK_THROWS_AS(projective_measure(spin_ready(1.0, 0.0), Factor::S1, bad, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("register reads: probabilities and collapse") {
    RngStream rng(17);
    const double theta = 0.9;

    // Carol measures the singlet: her register holds up/down with equal
    // weight and is never Ready afterwards.
    const Ket measured = apply(friend_unitary(AgentId::Carol, Angle(theta)), singlet());
    const std::array<double, 3> probs = register_probabilities(measured, AgentId::Carol);
    CHECK(std::abs(probs[kReady]) < kExactTol);
    CHECK(probs[kSawUp] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[kSawDown] == doctest::Approx(0.5).epsilon(1e-12));

    auto [outcome, post] = read_register(measured, AgentId::Carol, rng);
    CHECK(outcome != Outcome::Ready);
    const std::array<double, 3> collapsed = register_probabilities(post, AgentId::Carol);
    const int slot = outcome == Outcome::Plus ? kSawUp : kSawDown;
    CHECK(collapsed[size_t(slot)] == doctest::Approx(1.0).epsilon(1e-12));

    // An untouched register reads Ready with certainty.
    auto [ready_outcome, same] = read_register(measured, AgentId::Dan, rng);
    CHECK(ready_outcome == Outcome::Ready);
    CHECK(distance(same, measured) < kInvariantTol);

    // Born consistency: register probabilities always sum to 1.
    for (int trial = 0; trial < 10; ++trial) {
        const Ket psi = random_ket(space(), rng);
        const std::array<double, 3> p = register_probabilities(psi, AgentId::Bob);
        CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-10));
    }
}
