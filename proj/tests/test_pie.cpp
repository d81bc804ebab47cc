#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qpty/pie.hpp"

using namespace qpty;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

PtychoDataset exact_data(const StateVector &psi, const UnitarySpec &u) {
    return generate_dataset(psi, u, 0, std::nullopt, 0);
}

double run_fidelity(const StateVector &psi, const UnitarySpec &u, std::uint64_t init_seed,
                    PieConfig cfg = PieConfig::variable(0.04)) {
    cfg.init_seed = init_seed;
    return fidelity(psi, pie_run(exact_data(psi, u), cfg).estimate);
}

std::vector<std::string> separable_tags(int n) {
    if (n == 2) {
        return {"psi1", "psi2", "psi3", "psi4"};
    }
    return {"psi1n", "psi2n", "psi3n"};
}

} // namespace

TEST(Metrics, TraceDistanceExamples) {
    const auto z0 = StateVector::basis(1, 0);
    EXPECT_NEAR(trace_distance(z0, z0), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(z0, StateVector::basis(1, 1)), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(z0, StateVector(1, {kR, kR})), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Metrics, FidelityExamples) {
    const auto z0 = StateVector::basis(1, 0);
    EXPECT_NEAR(fidelity(z0, z0), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(z0, StateVector::basis(1, 1)), 0.0, 1e-15);
}

TEST(Metrics, NormalizeInternallyAndRejectZero) {
    const StateVector a(1, {3, 0});
    const StateVector b(1, {2, 2});
    EXPECT_NEAR(fidelity(a, b), 0.5, 1e-15);
    EXPECT_NEAR(trace_distance(a, b), kR, 1e-15);
    EXPECT_THROW(fidelity(StateVector(1), a), std::invalid_argument);
    EXPECT_THROW(trace_distance(a, StateVector(1)), std::invalid_argument);
}

TEST(Metrics, FidelityIsOneMinusDistanceSquaredAndPhaseBlind) {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + i % 4;
        const auto a = random_arbitrary(n, rng);
        auto b = random_arbitrary(n, rng);
        const double f = fidelity(a, b);
        const double d = trace_distance(a, b);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_NEAR(f, 1.0 - d * d, 1e-12);
        const cplx ph = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
        auto a_ph = a;
        for (std::size_t j = 0; j < a_ph.dim(); ++j) {
            a_ph[j] *= ph;
        }
        EXPECT_NEAR(fidelity(a_ph, b), f, 1e-12);
    }
}

TEST(BetaSchedule, VariableSchedules) {
    const auto c20 = PieConfig::variable(0.1);
    EXPECT_EQ(c20.iterations, 20);
    EXPECT_NEAR(beta_schedule(1, c20), 2.0, 1e-15);
    EXPECT_NEAR(beta_schedule(20, c20), 0.1, 1e-12);
    const auto c50 = PieConfig::variable(0.04);
    EXPECT_EQ(c50.iterations, 50);
    EXPECT_NEAR(beta_schedule(50, c50), 0.04, 1e-12);
    const PieConfig def;
    EXPECT_EQ(def.iterations, 50);
    EXPECT_EQ(def.beta0, 2.0);
    EXPECT_EQ(def.delta_beta, 0.04);
}

TEST(BetaSchedule, ConstantAndErrors) {
    const auto c = PieConfig::constant(1.5, 30);
    for (int i = 1; i <= 30; ++i) {
        EXPECT_EQ(beta_schedule(i, c), 1.5);
    }
    EXPECT_THROW(beta_schedule(0, c), std::out_of_range);
    EXPECT_THROW(beta_schedule(31, c), std::out_of_range);
    auto too_long = PieConfig::variable(0.04);
    too_long.iterations = 51;
    EXPECT_THROW(too_long.validate(), std::invalid_argument);
    EXPECT_THROW(PieConfig::variable(0.0), std::invalid_argument);
    EXPECT_THROW(PieConfig::constant(1.0, 0).validate(), std::invalid_argument);
}

TEST(CorrectionStep, HandExample) {
    const std::vector<double> target = {kR, kR};
    const Transform u(UnitarySpec::qft(), 1);
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto out = pie_correction_step(StateVector::basis(1, 1), {Pauli::Z, 0, +1}, target, u, beta);
        EXPECT_NEAR(std::abs(out[0] - cplx{beta}), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(out[1] - cplx{1.0}), 0.0, 1e-15);
        // the working estimate is not renormalized
        EXPECT_NEAR(out.norm_squared(), 1.0 + beta * beta, 1e-14);
    }
}

TEST(CorrectionStep, FixedPointAndZeroBeta) {
    Rng rng(6);
    for (int n = 1; n <= 5; ++n) {
        const auto phi = random_arbitrary(n, rng);
        for (const auto &spec : {UnitarySpec::qft(), UnitarySpec::aqft(1), UnitarySpec::hadamard()}) {
            const Transform u(spec, n);
            for (const auto &id : all_projectors(n)) {
                const auto tilde = u.apply(apply_pauli_projector(phi, id));
                std::vector<double> target(phi.dim());
                for (std::size_t j = 0; j < phi.dim(); ++j) {
                    target[j] = std::abs(tilde[j]);
                }
                const auto fixed = pie_correction_step(phi, id, target, u, 1.3);
                std::vector<double> noisy = target;
                noisy[0] += 0.3;
                const auto frozen = pie_correction_step(phi, id, noisy, u, 0.0);
                for (std::size_t j = 0; j < phi.dim(); ++j) {
                    EXPECT_NEAR(std::abs(fixed[j] - phi[j]), 0.0, 1e-12);
                    EXPECT_EQ(frozen[j], phi[j]);
                }
            }
        }
    }
}

TEST(CorrectionStep, OnlyTouchesProjectedSubspace) {
    Rng rng(8);
    const auto phi = random_arbitrary(3, rng);
    const Transform u(UnitarySpec::qft(), 3);
    const ProjectorId id{Pauli::Y, 1, -1};
    const std::vector<double> target(8, 0.2);
    const auto out = pie_correction_step(phi, id, target, u, 0.7);
    // The complementary projection is unchanged.
    const auto a = apply_pauli_projector(out, {Pauli::Y, 1, +1});
    const auto b = apply_pauli_projector(phi, {Pauli::Y, 1, +1});
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_NEAR(std::abs(a[j] - b[j]), 0.0, 1e-14);
    }
}

TEST(CorrectionStep, Errors) {
    const Transform u2(UnitarySpec::qft(), 2);
    const auto phi = StateVector::basis(2, 0);
    EXPECT_THROW(pie_correction_step(phi, {Pauli::X, 0, +1}, std::vector<double>(2, 0.5), u2, 1.0),
                 std::invalid_argument);
    EXPECT_THROW(pie_correction_step(phi, {Pauli::X, 0, +1}, std::vector<double>{0.5, -0.1, 0, 0}, u2, 1.0),
                 std::invalid_argument);
    EXPECT_THROW(pie_correction_step(phi, {Pauli::X, 2, +1}, std::vector<double>(4, 0.5), u2, 1.0),
                 std::out_of_range);
    EXPECT_THROW(pie_correction_step(phi, {Pauli::X, 0, +1}, std::vector<double>(8, 0.5),
                                     Transform(UnitarySpec::qft(), 3), 1.0),
                 std::invalid_argument);
}

TEST(PieRun, BellExactData) {
    const auto psi = named_state("bell", 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        EXPECT_GT(run_fidelity(psi, UnitarySpec::qft(), seed, PieConfig::variable(0.04)), 0.999);
    }
}

TEST(PieRun, TraceShapeAndRanges) {
    const auto psi = named_state("w", 3);
    const auto res = pie_run(exact_data(psi, UnitarySpec::qft()), PieConfig::variable(0.1, 3), psi);
    ASSERT_EQ(res.trace.rows.size(), 20U);
    for (std::size_t i = 0; i < res.trace.rows.size(); ++i) {
        const auto &r = res.trace.rows[i];
        EXPECT_EQ(r.iteration, static_cast<int>(i) + 1);
        EXPECT_NEAR(r.beta, 2.0 - 0.1 * static_cast<double>(i), 1e-12);
        EXPECT_GE(r.distance, 0.0);
        EXPECT_LE(r.distance, 1.0);
        ASSERT_TRUE(r.fidelity.has_value());
        EXPECT_GE(*r.fidelity, 0.0);
        EXPECT_LE(*r.fidelity, 1.0);
    }
    EXPECT_NEAR(res.estimate.norm(), 1.0, 1e-12);
    EXPECT_NEAR(*res.trace.rows.back().fidelity, fidelity(psi, res.estimate), 1e-12);
    EXPECT_GE(res.trace.wall_seconds, 0.0);

    const auto no_ref = pie_run(exact_data(psi, UnitarySpec::qft()), PieConfig::variable(0.1, 3));
    EXPECT_FALSE(no_ref.trace.rows.front().fidelity.has_value());
}

TEST(PieRun, Deterministic) {
    const auto ds = generate_dataset(named_state("psi9", 2), UnitarySpec::qft(), 2000, std::nullopt, 3);
    auto cfg = PieConfig::variable(0.04, 12);
    EXPECT_EQ(pie_run(ds, cfg).estimate.data(), pie_run(ds, cfg).estimate.data());
    cfg.order = ProjectorOrder::Shuffled;
    cfg.shuffle_seed = 5;
    const auto a = pie_run(ds, cfg);
    EXPECT_EQ(a.estimate.data(), pie_run(ds, cfg).estimate.data());
    auto other = cfg;
    other.init_seed = 13;
    EXPECT_NE(a.estimate.data(), pie_run(ds, other).estimate.data());
}

TEST(PieRun, ShuffledOrderConverges) {
    const auto psi = named_state("ghz", 3);
    auto cfg = PieConfig::variable(0.04, 1);
    cfg.order = ProjectorOrder::Shuffled;
    cfg.shuffle_seed = 99;
    EXPECT_GT(fidelity(psi, pie_run(exact_data(psi, UnitarySpec::qft()), cfg).estimate), 1 - 1e-4);
}

TEST(PieRun, EarlyStop) {
    const auto psi = named_state("psi1n", 3);
    auto cfg = PieConfig::variable(0.04, 2);
    cfg.early_stop_distance = 1e-3;
    const auto res = pie_run(exact_data(psi, UnitarySpec::qft()), cfg);
    ASSERT_LT(res.trace.rows.size(), 50U);
    EXPECT_LT(res.trace.rows.back().distance, 1e-3);
    for (std::size_t i = 0; i + 1 < res.trace.rows.size(); ++i) {
        EXPECT_GE(res.trace.rows[i].distance, 1e-3);
    }
}

TEST(PieRun, Errors) {
    auto ds = exact_data(named_state("bell", 2), UnitarySpec::qft());
    EXPECT_THROW(pie_run(ds, PieConfig::variable(0.04), StateVector::basis(3, 0)), std::invalid_argument);
    auto broken = ds;
    broken.records.pop_back();
    EXPECT_THROW(pie_run(broken, PieConfig::variable(0.04)), std::invalid_argument);
    auto bad_cfg = PieConfig::variable(0.04);
    bad_cfg.iterations = 60;
    EXPECT_THROW(pie_run(ds, bad_cfg), std::invalid_argument);
}

TEST(PieRun, ExactDataConvergesForBenchmarkStatesAndTransforms) {
    for (int n = 2; n <= 4; ++n) {
        std::vector<UnitarySpec> specs = {UnitarySpec::qft(), UnitarySpec::aqft(2)};
        if (n >= 3) {
            specs.push_back(UnitarySpec::aqft(3));
        }
        for (const auto &spec : specs) {
            for (const auto &tag : table_tags(n)) {
                const auto psi = named_state(tag, n);
                const auto ds = exact_data(psi, spec);
                for (std::uint64_t seed = 0; seed < 10; ++seed) {
                    auto cfg = PieConfig::variable(0.04, derive_seed(77, {seed}));
                    EXPECT_GT(fidelity(psi, pie_run(ds, cfg).estimate), 1 - 1e-4)
                        << tag << " n=" << n << " " << spec.label() << " seed " << seed;
                }
            }
        }
    }
}

TEST(PieRun, HadamardTransformFailsOnGhz) {
    for (int n = 2; n <= 4; ++n) {
        for (const auto &tag : separable_tags(n)) {
            const auto psi = named_state(tag, n);
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                EXPECT_GT(run_fidelity(psi, UnitarySpec::hadamard(), seed), 1 - 1e-3) << tag << " n=" << n;
            }
        }
    }
    const auto ghz = named_state("ghz", 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        EXPECT_LE(run_fidelity(ghz, UnitarySpec::hadamard(), seed), 0.9);
    }
}
