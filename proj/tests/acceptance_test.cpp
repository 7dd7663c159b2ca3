#include <gtest/gtest.h>

#include <iostream>

#include <semiuniform/verify.hpp>

using namespace semiuniform;

namespace {

void report(const CheckResult& r) {
  std::cout << summary_line(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

}  // namespace

TEST(Acceptance, C01_ConvergentIdentities) { report(check_convergent_identities()); }
TEST(Acceptance, C02_OddOddStream) { report(check_odd_odd_stream()); }
TEST(Acceptance, C03_SandwichUpper) { report(check_sandwich_upper()); }
TEST(Acceptance, C04_SandwichLower) { report(check_sandwich_lower()); }
TEST(Acceptance, C05_QuadraticGrowth) { report(check_quadratic_growth()); }
TEST(Acceptance, C06_RationalSingularity) { report(check_rational_singularity()); }
TEST(Acceptance, C07_ConstructionFidelity) { report(check_construction_fidelity()); }
TEST(Acceptance, C08_NonPositiveIncrease) { report(check_non_positive_increase()); }
TEST(Acceptance, C09_RateFormulas) { report(check_rate_formulas()); }
TEST(Acceptance, C10_PortHamiltonianCrossCheck) { report(check_phs_cross()); }
TEST(Acceptance, C11_ResolventSelfConsistency) { report(check_resolvent_consistency()); }
TEST(Acceptance, C12_CharacterisationLowerSide) { report(check_characterisation()); }
TEST(Acceptance, Sampled_AlmostEveryGrowth) { report(check_sampled()); }
