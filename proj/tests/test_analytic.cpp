#include <gtest/gtest.h>

#include "support.hpp"

namespace tcqpt {
namespace {

using testing::Rng;

ModelParams gain_balanced_params(double dc, double ds, double gperp, double gpar, double lambda = 8.0) {
    ModelParams p;
    p.delta_c = dc;
    p.delta_s = ds;
    p.lambda = lambda;
    p.omega_a = 1.0;
    p.kappa_c = 1.0;
    p.gamma_perp = gperp;
    p.gamma_par = gpar;
    return apply_regime(p, Regime::gain_balanced);
}

TEST(HermitianOrder, TwiceCriticalCoupling) {
    ModelParams p;
    p.delta_c = p.delta_s = 4.0;
    const OrderParameters o = hermitian_order(p, 8.0);
    EXPECT_DOUBLE_EQ(o.jz, -0.25);
    EXPECT_NEAR(o.jm.real(), std::sqrt(15.0) / 4.0, 1e-15);
    EXPECT_NEAR(o.f_quantity, 1.0, 1e-15);
}

TEST(HermitianOrder, NormalPhaseAndContinuity) {
    ModelParams p;
    p.delta_c = 3.0;
    p.delta_s = 5.0;
    p.omega_a = 0.7;
    const double lc = std::sqrt(15.0);
    const OrderParameters below = hermitian_order(p, 0.9 * lc);
    EXPECT_EQ(below.jz, -1.0);
    EXPECT_EQ(below.jm, cplx(0.0));
    const OrderParameters at = hermitian_order(p, lc);
    EXPECT_NEAR(at.jz, -1.0, 1e-15);
    EXPECT_NEAR(std::abs(at.jm), 0.0, 1e-7);
    EXPECT_NEAR(at.n_phot, std::pow(0.7 / 3.0, 2), 1e-15);
}

TEST(GainBalancedOrder, TwiceCriticalCoupling) {
    ModelParams p = gain_balanced_params(8, 8, 1.0, 0.1);
    const double lc = critical_coupling(p, Regime::gain_balanced);
    const OrderParameters o = gain_balanced_order(p, 2.0 * lc);
    EXPECT_NEAR(o.jz, -0.25, 1e-15);
    EXPECT_NEAR(o.jm.real(), 0.5 * std::sqrt(0.075), 1e-15);
    EXPECT_NEAR(o.f_quantity, 0.08125, 1e-15);
}

TEST(GainBalancedOrder, NormalPhasePhotonNumber) {
    ModelParams p = gain_balanced_params(8, 8, 1.0, 0.1, 4.0);
    const OrderParameters o = gain_balanced_order(p, 4.0);
    EXPECT_NEAR(o.n_phot, 1.0 / 65.0, 1e-16);
    EXPECT_EQ(o.f_quantity, 1.0);
    EXPECT_EQ(o.jz, -1.0);
}

TEST(GainBalancedOrder, FallsBackWithoutTransversalRelaxation) {
    ModelParams p;
    p.delta_c = p.delta_s = 4.0;
    p.omega_a = 1.0;
    const OrderParameters a = gain_balanced_order(p, 8.0), b = hermitian_order(p, 8.0);
    EXPECT_EQ(a.jz, b.jz);
    EXPECT_EQ(a.jm, b.jm);
}

TEST(Properties, BranchesAreContinuousAtThreshold) {
    Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        ModelParams p = gain_balanced_params(rng.uniform(2, 10), rng.uniform(2, 10), rng.uniform(0.1, 2), rng.uniform(0.05, 1));
        for (Regime r : {Regime::hermitian, Regime::gain_balanced}) {
            const double lc = closed_form_critical_coupling(p, r);
            const OrderParameters lo = closed_form_order(p, lc * (1 - 1e-12), r), hi = closed_form_order(p, lc, r);
            EXPECT_NEAR(lo.jz, hi.jz, 1e-10);
            EXPECT_NEAR(std::abs(lo.jm), std::abs(hi.jm), 1e-5);
            EXPECT_NEAR(lo.f_quantity, hi.f_quantity, 1e-10);
        }
    }
}

TEST(Properties, GainBalancedJzTendsToHermitianJz) {
    ModelParams h;
    h.delta_c = 5.0;
    h.delta_s = 7.0;
    for (double lambda : {4.0, 6.0, 9.0, 14.0}) {
        const double target = hermitian_order(h, lambda).jz;
        double prev = 1.0;
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
            ModelParams p = h;
            p.gamma_perp = eps;
            p.gamma_par = eps / 2;
            const double err = std::abs(gain_balanced_order(p, lambda).jz - target);
            EXPECT_LE(err, prev);
            prev = err;
        }
        EXPECT_LT(prev, 1e-7);
    }
}

TEST(Properties, FFromDefinitionEqualsClosedForm) {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        ModelParams p = gain_balanced_params(rng.uniform(2, 10), rng.uniform(2, 10), rng.uniform(0.1, 2), rng.uniform(0.01, 3));
        const double lc = critical_coupling(p, Regime::gain_balanced);
        const OrderParameters o = gain_balanced_order(p, lc * rng.uniform(1.0, 4.0));
        const double jx = o.jm.real(), jy = o.jm.imag();
        EXPECT_NEAR(jx * jx + jy * jy + o.jz * o.jz, o.f_quantity, 1e-14);
        EXPECT_NEAR(o.n_phot, std::norm(o.a_mean), 0.0);
    }
}

TEST(PhotonVariation, ZeroAtAndBelowThreshold) {
    ModelParams p = gain_balanced_params(8, 8, 1.0, 0.1);
    const double lc = critical_coupling(p, Regime::gain_balanced);
    EXPECT_EQ(photon_number_variation(p, lc, Regime::gain_balanced), 0.0);
    EXPECT_EQ(photon_number_variation(p, 0.5 * lc, Regime::gain_balanced), 0.0);
}

TEST(PhotonVariation, HermitianLeadingAmplitude) {
    ModelParams p;
    p.delta_c = 6.0;
    p.delta_s = 8.0;
    p.omega_a = 1.3;
    const double lc = critical_coupling(p, Regime::hermitian);
    const double expected = 2.0 * 1.3 * std::sqrt(lc) / 36.0;
    EXPECT_DOUBLE_EQ(photon_variation_amplitude(p, Regime::hermitian), expected);
    const double dl = 1e-9 * lc;
    EXPECT_NEAR(photon_number_variation(p, lc + dl, Regime::hermitian) / std::sqrt(dl), expected, 1e-3 * expected);
}

TEST(PhotonVariation, GainBalancedLeadingAmplitude) {
    ModelParams p = gain_balanced_params(6.0, 8.0, 1.0, 0.1);
    p.omega_a = 1.3;
    p = apply_regime(p, Regime::gain_balanced);
    const double lc = critical_coupling(p, Regime::gain_balanced);
    const double g = 1.0 / 8.0;
    const double expected = 1.3 * std::sqrt(2.0 * lc * 0.1) / (36.0 * (1.0 + g * g));
    EXPECT_DOUBLE_EQ(photon_variation_amplitude(p, Regime::gain_balanced), expected);
    const double dl = 1e-9 * lc;
    EXPECT_NEAR(photon_number_variation(p, lc + dl, Regime::gain_balanced) / std::sqrt(dl), expected, 1e-3 * expected);
}

std::vector<CriticalSample> closed_form_samples(const ModelParams& p, Regime r, int which) {
    const double lc = closed_form_critical_coupling(p, r);
    std::vector<CriticalSample> s;
    for (double t : linspace(-5.0, -3.0, 16)) {
        const double lambda = lc * (1.0 + std::pow(10.0, t));
        const OrderParameters o = closed_form_order(p, lambda, r);
        s.push_back({lambda, which == 0 ? o.jz : which == 1 ? std::abs(o.jm) : o.n_phot});
    }
    return s;
}

TEST(ExponentFit, ClosedFormExponents) {
    ModelParams p = gain_balanced_params(8, 8, 1.0, 0.1);
    ModelParams h;
    h.delta_c = h.delta_s = 8.0;
    h.omega_a = 1.0;
    for (auto [params, regime] : {std::pair{h, Regime::hermitian}, std::pair{p, Regime::gain_balanced}}) {
        const double lc = closed_form_critical_coupling(params, regime);
        const OrderParameters c = closed_form_order(params, lc, regime);
        EXPECT_NEAR(fit_critical_exponent(closed_form_samples(params, regime, 0), lc, c.jz).exponent, 1.0, 0.05);
        EXPECT_NEAR(fit_critical_exponent(closed_form_samples(params, regime, 1), lc, 0.0).exponent, 0.5, 0.05);
        EXPECT_NEAR(fit_critical_exponent(closed_form_samples(params, regime, 2), lc, c.n_phot).exponent, 0.5, 0.05);
    }
}

TEST(ExponentFit, RecoversExactPowerLaw) {
    std::vector<CriticalSample> s;
    for (double t : linspace(-4, 0, 12)) s.push_back({2.0 + std::pow(10.0, t), 3.0 + 0.7 * std::pow(std::pow(10.0, t), 0.37)});
    const ExponentFit f = fit_critical_exponent(s, 2.0, 3.0);
    EXPECT_NEAR(f.exponent, 0.37, 1e-10);
    EXPECT_NEAR(f.amplitude, 0.7, 1e-9);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_EQ(f.used, 12u);
}

TEST(ExponentFit, Errors) {
    std::vector<CriticalSample> few(7, {2.0, 1.0});
    EXPECT_THROW(fit_critical_exponent(few, 1.0, 0.0), InputError);
    std::vector<CriticalSample> wrong_side;
    for (int i = 0; i < 10; ++i) wrong_side.push_back({0.5 + 0.01 * i, 1.0});
    EXPECT_THROW(fit_critical_exponent(wrong_side, 1.0, 0.0), InputError);
    std::vector<CriticalSample> flat;
    for (int i = 0; i < 10; ++i) flat.push_back({1.1 + 0.01 * i, i < 3 ? 1.0 + i : 0.0});
    EXPECT_THROW(fit_critical_exponent(flat, 1.0, 0.0), InputError);
    // Points within 1e-6 lambda_c of the threshold are dropped.
    std::vector<CriticalSample> near;
    for (int i = 0; i < 10; ++i) near.push_back({1.0 + 1e-8 * (i + 1), 1.0});
    EXPECT_THROW(fit_critical_exponent(near, 1.0, 0.0), InputError);
}

}  // namespace
}  // namespace tcqpt
