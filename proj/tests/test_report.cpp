#include "fixtures.hpp"

#include "knapcount/report.hpp"

#include <doctest.h>

using namespace knapcount;
using namespace knapcount::testing;

TEST_CASE("instance digest is the SHA-256 of the serialized text") {
  CHECK(instance_digest(small_instance()) == "75b50068f401c17442c572bdd97eb0f83a19b0e015fb022499303fb1caf8fed3");
}

TEST_CASE("reports round-trip through JSON") {
  const auto inst = scale_instance(mixed_instance(), AlgoParams{});
  Rng r1(4), r2(4);
  for (const auto& rep : {estimate_subquadratic(inst, AlgoParams{}, r1), estimate_dyer(inst, AlgoParams{}, r2)}) {
    const auto j = report_to_json(rep);
    const auto back = report_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.estimate == rep.estimate);
    CHECK(back.algo == rep.algo);
    CHECK(back.ell == rep.ell);
    CHECK(back.hits == rep.hits);
    CHECK(back.classes.size() == rep.classes.size());
    CHECK(report_to_json(back) == j);
  }
}

TEST_CASE("estimate strings") {
  EstimateReport rep;
  rep.algo = "exact-enum";
  rep.estimate = XReal::from_u64(5);
  CHECK(report_to_json(rep).at("estimate") == "5");
  rep.estimate = XReal::from_double(0.5);
  CHECK(xreal_from_json(xreal_to_json(rep.estimate)) == rep.estimate);
}
