#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "uclt/errors.hpp"
#include "uclt/serialization.hpp"

namespace uclt {
namespace {

void expect_same_psi(const PsiFunction& a, const PsiFunction& b) {
  EXPECT_EQ(a.form(), b.form());
  EXPECT_EQ(a.support_low(), b.support_low());
  EXPECT_EQ(a.support_high(), b.support_high());
  for (double p : {1.5, 2.5, 3.0, 4.0, 7.0, 50.0}) EXPECT_EQ(a(p), b(p)) << p;
}

TEST(PsiJson, RoundTripsEveryForm) {
  const std::vector<PsiFunction> forms{
      PsiFunction::closed_power(2.0),
      PsiFunction::closed_power(0.5, 1.0, 60.0),
      PsiFunction::tabulated({2.0, 3.0, 7.0}, {1.0, 1.3, 2.2}, 1.0),
      PsiFunction::degenerate(3.0),
      PsiFunction::scaled(1.5, PsiFunction::closed_power(1.0)),
      rosenthal_transform(PsiFunction::closed_power(2.0, 1.0))};
  for (const auto& psi : forms) {
    const Json j = to_json(psi);
    expect_same_psi(psi_from_json(Json::parse(j.dump())), psi);
  }
}

TEST(PsiJson, InfiniteSupportIsNull) {
  const Json j = to_json(PsiFunction::closed_power(2.0));
  EXPECT_TRUE(j["support"][1].is_null());
  EXPECT_EQ(j["form"], "closed_power");
}

TEST(PsiJson, RejectsUnknownForm) {
  EXPECT_THROW(psi_from_json(Json::parse(R"({"form": "spline"})")), InvalidArgument);
}

TEST(MomentCurveJson, RoundTripWithProvenance) {
  const MomentCurve c({2.0, 4.0}, {1.0, 1.3}, MomentCurve::Provenance::monte_carlo(42, 1000), {0.01, 0.02});
  const auto d = moment_curve_from_json(Json::parse(to_json(c).dump()));
  EXPECT_EQ(d.p_grid(), c.p_grid());
  EXPECT_EQ(d.norms(), c.norms());
  EXPECT_EQ(d.std_errors(), c.std_errors());
  EXPECT_EQ(d.provenance().seed, 42u);
  EXPECT_EQ(d.provenance().replications, 1000);
  EXPECT_EQ(d.provenance().kind, MomentCurve::Provenance::Kind::MonteCarlo);
}

TEST(TailJson, RoundTripEveryForm) {
  for (const auto& t : {TailFunction::closed_weibull(1.5, 0.7), TailFunction::tabulated({1.0, 2.0}, {0.4, 0.0}),
                        TailFunction::degenerate_zero()}) {
    const auto u = tail_from_json(Json::parse(to_json(t).dump()));
    EXPECT_EQ(u.form(), t.form());
    for (double x : {0.0, 0.5, 1.0, 1.7, 3.0}) EXPECT_EQ(u(x), t(x));
  }
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(kInf), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_TRUE(finite_or_null(kInf).is_null());
  EXPECT_EQ(finite_or_null(2.5).get<double>(), 2.5);
}

TEST(Files, AtomicWriteUsesLf) {
  const auto path = std::filesystem::temp_directory_path() / "uclt_write_test.txt";
  write_text_file(path, "a\nb\n");
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a\nb\n");
}

}  // namespace
}  // namespace uclt
