#include <gtest/gtest.h>

#include "support.hpp"

namespace tcqpt {
namespace {

using testing::Rng;

ModelParams basic(double dc = 8, double ds = 8, double lambda = 8) {
    ModelParams p;
    p.delta_c = dc;
    p.delta_s = ds;
    p.lambda = lambda;
    return p;
}

TEST(MatchingRatio, HermitianEqualDetuningAndCoupling) {
    EXPECT_EQ(matching_ratio(basic(), Regime::hermitian), cplx(1.0, 0.0));
}

TEST(MatchingRatio, GainBalancedEvaluatesDirectly) {
    ModelParams p = basic();
    p.gamma_perp = 1.0;
    const cplx r = matching_ratio(p, Regime::gain_balanced);
    EXPECT_DOUBLE_EQ(r.real(), 1.0);
    EXPECT_DOUBLE_EQ(r.imag(), 0.125);
}

TEST(MatchingRatio, LossyUsesNetDamping) {
    ModelParams p = basic();
    p.kappa_c = 1.0;
    const cplx r = matching_ratio(p, Regime::lossy);
    EXPECT_DOUBLE_EQ(r.real(), 1.0);
    EXPECT_DOUBLE_EQ(r.imag(), -0.125);
}

TEST(MatchingRatio, ZeroCouplingIsAnError) {
    EXPECT_THROW(matching_ratio(basic(8, 8, 0), Regime::hermitian), InputError);
}

TEST(GainBalanceRate, Examples) {
    ModelParams p = basic();
    p.kappa_c = 1.0;
    p.gamma_perp = 1.0;
    EXPECT_DOUBLE_EQ(gain_balance_rate(p), 2.0);
    p.gamma_perp = 0.0;
    EXPECT_DOUBLE_EQ(gain_balance_rate(p), 1.0);
    ModelParams q = basic(4, 2);
    q.gamma_perp = 1.0;
    EXPECT_DOUBLE_EQ(gain_balance_rate(q), 2.0);
}

TEST(GainBalanceRate, CancelsCoupledLoss) {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        ModelParams p = rng.dissipative();
        p.kappa_g = gain_balance_rate(p);
        EXPECT_NEAR(p.delta_c * p.gamma_perp + p.delta_s * p.kappa(), 0.0, 1e-12 * p.delta_c * p.gamma_perp + 1e-14);
    }
}

TEST(GainBalanceRate, ZeroEnsembleDetuningIsAnError) {
    ModelParams p = basic(8, 0);
    EXPECT_THROW(gain_balance_rate(p), InputError);
}

TEST(CriticalCoupling, SymmetricHermitian) { EXPECT_DOUBLE_EQ(critical_coupling(basic(4, 4), Regime::hermitian), 4.0); }

TEST(CriticalCoupling, GainBalancedThresholdRatio) {
    // lambda = 8, Delta_s = Delta_c, gamma_perp = 1: lambda = lambda_c at lambda/Delta_c = 8/sqrt(63).
    const double dc = std::sqrt(63.0);
    ModelParams p = basic(dc, dc);
    p.gamma_perp = 1.0;
    EXPECT_NEAR(critical_coupling(p, Regime::gain_balanced), 8.0, 1e-12);
    EXPECT_NEAR(8.0 / dc, 1.008, 5e-4);
}

TEST(CriticalCoupling, GainBalancedNeverBelowHermitian) {
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        ModelParams p = rng.dissipative();
        EXPECT_GT(critical_coupling(p, Regime::gain_balanced), critical_coupling(p, Regime::hermitian));
        p.gamma_perp = 0.0;
        EXPECT_EQ(critical_coupling(p, Regime::gain_balanced), critical_coupling(p, Regime::hermitian));
    }
}

TEST(CriticalCoupling, LossyHasNoTransition) { EXPECT_THROW(critical_coupling(basic(), Regime::lossy), InputError); }

TEST(Properties, GainBalancedRatioIsLossyRatioAtBalance) {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        ModelParams p = rng.dissipative();
        ModelParams q = p;
        q.kappa_g = gain_balance_rate(p);
        const cplx a = matching_ratio(p, Regime::gain_balanced), b = matching_ratio(q, Regime::lossy);
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-13 * std::abs(a));
    }
}

TEST(BuildEffective, HermitianMatchingCancelsDrive) {
    ModelParams p = basic(8, 6, 10);
    p.omega_a = 1.0;
    p = apply_regime(p, Regime::hermitian);
    const EffectiveModel e = build_effective(p);
    EXPECT_NEAR(std::abs(e.residual_drive), 0.0, 1e-15);
    EXPECT_TRUE(e.matched_hermitian);
    // Without rates the gain-balanced condition coincides with the Hermitian one.
    EXPECT_TRUE(e.matched_gain_balanced);
    EXPECT_DOUBLE_EQ(e.alpha.real(), -1.0 / 8.0);
}

TEST(BuildEffective, MismatchLeavesResidualAndNoFlag) {
    ModelParams p = basic(8, 6, 10);
    p.omega_a = 1.0;
    p = apply_regime(p, Regime::hermitian, 1.2);
    const EffectiveModel e = build_effective(p);
    // omega_j = omega_a lambda / (1.2 Delta_c); residual = omega_j (1 - 1.2).
    EXPECT_NEAR(std::abs(e.residual_drive - p.omega_j * (1.0 - 1.2)), 0.0, 1e-15);
    EXPECT_FALSE(e.matched_hermitian || e.matched_lossy || e.matched_gain_balanced);
}

TEST(BuildEffective, SingleDriveIsBiased) {
    ModelParams p = basic();
    p.omega_a = 0.5;
    const EffectiveModel e = build_effective(p);
    EXPECT_NEAR(std::abs(e.residual_drive - p.lambda * e.alpha), 0.0, 1e-15);
    EXPECT_GT(std::abs(e.residual_drive), 0.0);
}

TEST(BuildEffective, ResidualIsLinearInMismatch) {
    Rng rng(14);
    for (int i = 0; i < 30; ++i) {
        ModelParams p = rng.dissipative();
        const ModelParams matched = apply_regime(p, Regime::lossy);
        ModelParams p1 = matched, p2 = matched;
        const cplx delta = rng.complex(1.0);
        p1.omega_a += delta;
        p2.omega_a += 2.0 * delta;
        const cplx r1 = build_effective(p1).residual_drive, r2 = build_effective(p2).residual_drive;
        EXPECT_NEAR(std::abs(r2 - 2.0 * r1), 0.0, 1e-12 * (1.0 + std::abs(r1)));
    }
}

TEST(BuildEffective, GainBalancedFlags) {
    ModelParams p = basic(8, 8, 9);
    p.omega_a = 1.0;
    p.kappa_c = p.gamma_perp = 1.0;
    p = apply_regime(p, Regime::gain_balanced);
    const EffectiveModel e = build_effective(p);
    EXPECT_TRUE(e.gain_balanced);
    EXPECT_TRUE(e.matched_gain_balanced);
    EXPECT_TRUE(e.matched_lossy);  // identical conditions at the balance rate
    EXPECT_NEAR(std::abs(e.residual_drive), 0.0, 1e-14);
}

TEST(ApplyRegime, RejectsBadFactors) {
    ModelParams p = basic();
    p.omega_a = 1.0;
    EXPECT_THROW(apply_regime(p, Regime::lossy, 0.0), InputError);
    EXPECT_THROW(apply_regime(p, Regime::gain_balanced, 1.0, -1.0), InputError);
}

TEST(EmitterRates, DeriveEnsembleRates) {
    ModelParams p = basic();
    set_emitter_rates(p, 0.25, 0.5);
    EXPECT_DOUBLE_EQ(p.gamma_perp, 1.0);
    EXPECT_DOUBLE_EQ(p.gamma_par, 1.0);
    EXPECT_LE(p.gamma_par, 2.0 * p.gamma_perp);
    EXPECT_NO_THROW(validate(p));
    p.gamma_par = 0.9;
    EXPECT_THROW(validate(p), InputError);
}

TEST(Validate, RejectsNonPositiveDetuningsAndNegativeRates) {
    EXPECT_THROW(validate(basic(0, 8)), InputError);
    EXPECT_THROW(validate(basic(8, -1)), InputError);
    EXPECT_THROW(validate(basic(8, 8, -1)), InputError);
    ModelParams p = basic();
    p.kappa_g = -0.1;
    EXPECT_THROW(validate(p), InputError);
    p = basic();
    p.n_tls = 2.5;
    EXPECT_THROW(validate(p), InputError);
    p = basic();
    p.lambda = std::nan("");
    EXPECT_THROW(validate(p), InputError);
}

TEST(Frequencies, TripleSetsDetunings) {
    ModelParams p;
    set_frequencies(p, 10.0, 9.0, 2.0);
    EXPECT_EQ(p.delta_c, 8.0);
    EXPECT_EQ(p.delta_s, 7.0);
    p.lambda = 1.0;
    EXPECT_NO_THROW(validate(p));
    p.delta_c = 8.1;
    EXPECT_THROW(validate(p), InputError);
}

// Configuration text.

TEST(Config, ParsesCommentsAndDefaults) {
    const ModelParams p = parse_config("# model\n delta_c = 8\ndelta_s=6\n\nlambda = 10 \nomega_a_re = 1\n");
    EXPECT_EQ(p.delta_c, 8.0);
    EXPECT_EQ(p.delta_s, 6.0);
    EXPECT_EQ(p.lambda, 10.0);
    EXPECT_EQ(p.omega_a, cplx(1.0, 0.0));
    EXPECT_EQ(p.n_tls, 1.0);
    EXPECT_EQ(p.kappa_c, 0.0);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(parse_config("delta_c = 8\ndelta_s = 8\nlambda = 1\nbogus = 1\n"), InputError);
    EXPECT_THROW(parse_config("delta_c = 8\ndelta_c = 8\ndelta_s = 8\nlambda = 1\n"), InputError);
    EXPECT_THROW(parse_config("delta_c 8\n"), InputError);
    EXPECT_THROW(parse_config("delta_c = 8x\ndelta_s = 8\nlambda = 1\n"), InputError);
    EXPECT_THROW(parse_config("delta_c = 8\nlambda = 1\n"), InputError);
    EXPECT_THROW(parse_config("delta_c = 8\ndelta_s = 8\n"), InputError);
}

TEST(Config, FrequencyTripleMustAgreeWithDetunings) {
    EXPECT_NO_THROW(parse_config("omega_c = 10\nomega_s = 9\nomega_d = 2\ndelta_c = 8\nlambda = 1\n"));
    EXPECT_THROW(parse_config("omega_c = 10\nomega_s = 9\nomega_d = 2\ndelta_c = 8.5\nlambda = 1\n"), InputError);
    EXPECT_THROW(parse_config("omega_c = 10\nomega_s = 9\nlambda = 1\n"), InputError);
}

TEST(Config, EmitterRatesMustAgreeWithEnsembleRates) {
    const ModelParams p = parse_config("delta_c = 1\ndelta_s = 1\nlambda = 1\ngamma_p = 0.25\ngamma_h = 0.5\n");
    EXPECT_DOUBLE_EQ(p.gamma_perp, 1.0);
    EXPECT_DOUBLE_EQ(p.gamma_par, 1.0);
    EXPECT_THROW(parse_config("delta_c = 1\ndelta_s = 1\nlambda = 1\ngamma_p = 0.25\ngamma_h = 0.5\ngamma_perp = 2\n"), InputError);
}

TEST(Config, RoundTripIsBitIdentical) {
    Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        ModelParams p = rng.dissipative();
        p.n_tls = double(1 + i);
        if (i % 3 == 0) set_frequencies(p, rng.uniform(20, 30), rng.uniform(20, 30), rng.uniform(0, 10));
        if (i % 4 == 0) set_emitter_rates(p, rng.uniform(0, 1), rng.uniform(0, 1));
        validate(p);
        const ModelParams q = parse_config(format_config(p));
        EXPECT_EQ(p, q);
    }
}

TEST(Config, ShortestRoundTripNumbers) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
    Rng rng(16);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-300, 300) / 1000.0);
        EXPECT_EQ(parse_double(format_double(v), "v"), v);
    }
}

TEST(Config, SetParamKeepsProvenanceConsistent) {
    ModelParams p = parse_config("omega_c = 10\nomega_s = 9\nomega_d = 2\nlambda = 1\ngamma_p = 0.1\ngamma_h = 0.2\n");
    set_param(p, "omega_d", 3.0);
    EXPECT_EQ(p.delta_c, 7.0);
    set_param(p, "delta_s", 5.0);
    EXPECT_FALSE(p.omega_c.has_value());
    set_param(p, "gamma_par", 0.3);
    EXPECT_FALSE(p.gamma_p.has_value());
    EXPECT_NO_THROW(validate(p));
    EXPECT_THROW(set_param(p, "nope", 1.0), InputError);
}

}  // namespace
}  // namespace tcqpt
