#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "otseq/fewshot.hpp"
#include "otseq/seqdist.hpp"

using namespace otseq;

namespace {

// 1x1 sequences whose single entry tags the instance; stub metrics read the
// tags to script exact distances without running a real solver.
SegmentSequence tagged(double value) { return SegmentSequence::from_rows({{value}}); }

double tag_of(const SegmentSequence& s) { return s.data()(0, 0); }

Episode two_class_episode(std::vector<double> class0_tags, std::vector<double> class1_tags,
                          double query_tag, int query_label) {
  Episode episode;
  episode.n_way = 2;
  episode.k_shot = static_cast<int>(class0_tags.size());
  episode.q_per_class = 1;
  for (double tag : class0_tags) {
    episode.support.push_back({tagged(tag), 0});
  }
  for (double tag : class1_tags) {
    episode.support.push_back({tagged(tag), 1});
  }
  episode.query.push_back({tagged(query_tag), query_label});
  episode.query.push_back({tagged(query_tag), 1 - query_label});
  return episode;
}

// Distance equals the support instance's tag; the query is ignored.
double support_tag_metric(const SegmentSequence& support, const SegmentSequence&) {
  return tag_of(support);
}

double absolute_gap_metric(const SegmentSequence& a, const SegmentSequence& b) {
  return std::abs(tag_of(a) - tag_of(b));
}

}  // namespace

TEST_CASE("class mean distance averages per class in first-appearance order") {
  SUBCASE("scripted two-class means") {
    const Episode episode = two_class_episode({1.0, 3.0}, {2.0, 2.0}, 0.0, 0);
    const Vector means = class_mean_distance(episode.query[0].sequence, episode,
                                             support_tag_metric);
    REQUIRE(means.size() == 2);
    CHECK(means(0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(means(1) == doctest::Approx(2.0).epsilon(1e-15));
  }

  SUBCASE("k_shot of one returns the pairwise distance itself") {
    const Episode episode = two_class_episode({4.0}, {9.0}, 1.0, 0);
    const Vector means = class_mean_distance(episode.query[0].sequence, episode,
                                             absolute_gap_metric);
    CHECK(means(0) == doctest::Approx(3.0));
    CHECK(means(1) == doctest::Approx(8.0));
  }

  SUBCASE("query matching a support instance contributes a zero term") {
    const Episode episode = two_class_episode({1.0, 5.0}, {2.0, 6.0}, 1.0, 0);
    const Vector means = class_mean_distance(episode.query[0].sequence, episode,
                                             absolute_gap_metric);
    CHECK(means(0) == doctest::Approx(2.0));  // (0 + 4) / 2
  }

  SUBCASE("class axis follows first appearance, not label value") {
    Episode episode;
    episode.n_way = 2;
    episode.k_shot = 1;
    episode.q_per_class = 1;
    episode.support.push_back({tagged(5.0), 7});
    episode.support.push_back({tagged(1.0), 3});
    episode.query.push_back({tagged(0.0), 7});
    episode.query.push_back({tagged(0.0), 3});
    const std::vector<int> order = episode.class_order();
    REQUIRE(order == std::vector<int>{7, 3});
    const Vector means = class_mean_distance(episode.query[0].sequence, episode,
                                             support_tag_metric);
    CHECK(means(0) == doctest::Approx(5.0));
    CHECK(means(1) == doctest::Approx(1.0));

    const PredictionRecord record =
        classify_query(episode.query[0].sequence, 7, episode, support_tag_metric);
    CHECK(record.predicted_label == 3);
  }
}

TEST_CASE("predict_proba is a stable softmax of negated distances") {
  SUBCASE("equal distances split evenly") {
    Vector d(2);
    d << 4.2, 4.2;
    const Vector p = predict_proba(d);
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("gap of ln 3 yields a 3:1 split") {
    Vector d(2);
    d << 0.0, std::log(3.0);
    const Vector p = predict_proba(d);
    CHECK(p(0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p(1) == doctest::Approx(0.25).epsilon(1e-14));
  }

  SUBCASE("adding a constant changes nothing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
      Vector d(5);
      for (Index i = 0; i < 5; ++i) {
        d(i) = uni(rng);
      }
      const Vector base = predict_proba(d);
      const Vector shifted = predict_proba(Vector(d.array() + 137.0));
      for (Index i = 0; i < 5; ++i) {
        CHECK(std::abs(base(i) - shifted(i)) < 1e-12);
      }
    }
  }

  SUBCASE("output lies on the simplex and is entrywise positive") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      Vector d(7);
      for (Index i = 0; i < 7; ++i) {
        d(i) = uni(rng);
      }
      const Vector p = predict_proba(d);
      CHECK(std::abs(p.sum() - 1.0) < 1e-10);
      CHECK(p.minCoeff() > 0.0);
    }
  }

  SUBCASE("huge distances do not overflow") {
    Vector d(3);
    d << 1e8, 1e8 + 1.0, 1e8 + 2.0;
    const Vector p = predict_proba(d);
    CHECK(p.allFinite());
    CHECK(std::abs(p.sum() - 1.0) < 1e-10);
    CHECK(p(0) > p(1));
  }

  SUBCASE("rejects empty or non-finite input") {
    CHECK_THROWS_AS(predict_proba(Vector()), std::invalid_argument);
    Vector d(2);
    d << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(predict_proba(d), std::invalid_argument);
  }
}

TEST_CASE("classify_query keeps argmin and argmax consistent") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Episode episode = two_class_episode({uni(rng)}, {uni(rng)}, uni(rng), 0);
    const PredictionRecord record =
        classify_query(episode.query[0].sequence, 0, episode, absolute_gap_metric);
    Index argmin = 0;
    record.per_class_mean_distance.minCoeff(&argmin);
    Index argmax = 0;
    record.probabilities.maxCoeff(&argmax);
    CHECK(argmin == argmax);
    CHECK(record.predicted_label == episode.class_order()[static_cast<size_t>(argmin)]);
    CHECK(record.true_label == 0);
  }

  SUBCASE("exact ties resolve to the first class and are flagged") {
    const Episode episode = two_class_episode({2.0}, {2.0}, 0.0, 0);
    const PredictionRecord record =
        classify_query(episode.query[0].sequence, 0, episode, support_tag_metric);
    CHECK(record.predicted_label == 0);
    CHECK(record.tie_broken);
  }
}

TEST_CASE("episode_loss is the cross-entropy over the query set") {
  SUBCASE("a dominant true class drives the loss to zero") {
    // Query labels need only be a subset of the support labels, so both
    // queries can sit on the overwhelmingly favored class.
    Episode episode;
    episode.n_way = 2;
    episode.k_shot = 1;
    episode.q_per_class = 1;
    episode.support.push_back({tagged(0.0), 0});
    episode.support.push_back({tagged(1e6), 1});
    episode.query.push_back({tagged(0.0), 0});
    episode.query.push_back({tagged(0.0), 0});
    const double loss = episode_loss(episode, support_tag_metric);
    CHECK(loss >= 0.0);
    CHECK(loss < 1e-12);
  }

  SUBCASE("five equidistant classes cost ln 5 per query") {
    Episode episode;
    episode.n_way = 5;
    episode.k_shot = 1;
    episode.q_per_class = 1;
    for (int c = 0; c < 5; ++c) {
      episode.support.push_back({tagged(3.0), c});
      episode.query.push_back({tagged(0.0), c});
    }
    const double loss = episode_loss(episode, support_tag_metric);
    CHECK(loss == doctest::Approx(5.0 * std::log(5.0)).epsilon(1e-12));
  }

  SUBCASE("two classes with a ln 3 gap, true label on the far side") {
    Episode episode;
    episode.n_way = 2;
    episode.k_shot = 1;
    episode.q_per_class = 1;
    episode.support.push_back({tagged(0.0), 0});
    episode.support.push_back({tagged(std::log(3.0)), 1});
    episode.query.push_back({tagged(0.0), 1});
    episode.query.push_back({tagged(0.0), 0});
    const double loss = episode_loss(episode, support_tag_metric);
    const double expected = -std::log(0.25) - std::log(0.75);
    CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
    CHECK(-std::log(0.75) == doctest::Approx(0.2876820724517809).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_benchmark aggregates per-episode accuracies") {
  SUBCASE("a perfect metric scores one with zero halfwidth") {
    std::vector<Episode> episodes;
    for (int e = 0; e < 4; ++e) {
      Episode episode;
      episode.n_way = 2;
      episode.k_shot = 1;
      episode.q_per_class = 1;
      episode.support.push_back({tagged(1.0), 0});
      episode.support.push_back({tagged(2.0), 1});
      episode.query.push_back({tagged(1.0), 0});
      episode.query.push_back({tagged(2.0), 1});
      episodes.push_back(std::move(episode));
    }
    const BenchmarkReport report = evaluate_benchmark(episodes, absolute_gap_metric);
    CHECK(report.mean_accuracy == 1.0);
    CHECK(report.ci95_halfwidth == 0.0);
    CHECK(report.episode_count == 4);
    CHECK(report.per_episode_accuracies.size() == 4);
    CHECK(report.tie_count == 0);
  }

  SUBCASE("accuracies one and zero give mean half and halfwidth 0.98") {
    // Episode A: queries sit on their own class tags. Episode B: swapped, so
    // both queries are misclassified.
    std::vector<Episode> episodes;
    {
      Episode a;
      a.n_way = 2;
      a.k_shot = 1;
      a.q_per_class = 1;
      a.support.push_back({tagged(1.0), 0});
      a.support.push_back({tagged(2.0), 1});
      a.query.push_back({tagged(1.0), 0});
      a.query.push_back({tagged(2.0), 1});
      episodes.push_back(a);
      Episode b = a;
      b.query[0].label = 1;
      b.query[0].sequence = tagged(1.0);
      b.query[1].label = 0;
      b.query[1].sequence = tagged(2.0);
      episodes.push_back(b);
    }
    const BenchmarkReport report = evaluate_benchmark(episodes, absolute_gap_metric);
    CHECK(report.per_episode_accuracies[0] == 1.0);
    CHECK(report.per_episode_accuracies[1] == 0.0);
    CHECK(report.mean_accuracy == doctest::Approx(0.5).epsilon(1e-15));
    // sample stddev of {1, 0} is 1/sqrt(2); 1.96 / 2 = 0.98
    CHECK(report.ci95_halfwidth == doctest::Approx(0.98).epsilon(1e-12));
  }

  SUBCASE("a random metric on five ways sits near chance") {
    std::mt19937_64 noise_rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const SequenceMetric random_metric = [&](const SegmentSequence&, const SegmentSequence&) {
      return uni(noise_rng);
    };
    std::vector<Episode> episodes;
    for (int e = 0; e < 1000; ++e) {
      Episode episode;
      episode.n_way = 5;
      episode.k_shot = 1;
      episode.q_per_class = 1;
      for (int c = 0; c < 5; ++c) {
        episode.support.push_back({tagged(static_cast<double>(c)), c});
        episode.query.push_back({tagged(static_cast<double>(c)), c});
      }
      episodes.push_back(std::move(episode));
    }
    const BenchmarkReport report = evaluate_benchmark(episodes, random_metric);
    CHECK(report.mean_accuracy > 0.15);
    CHECK(report.mean_accuracy < 0.25);
  }

  SUBCASE("swapping metrics changes values but never bookkeeping") {
    std::vector<Episode> episodes;
    for (int e = 0; e < 6; ++e) {
      episodes.push_back(two_class_episode({1.0, 2.0}, {5.0, 6.0}, 1.5, 0));
    }
    const BenchmarkReport base = evaluate_benchmark(episodes, absolute_gap_metric);
    const SequenceMetric rescaled = [](const SegmentSequence& a, const SegmentSequence& b) {
      return 3.0 * absolute_gap_metric(a, b) + 7.0;
    };
    const BenchmarkReport other = evaluate_benchmark(episodes, rescaled);
    CHECK(base.episode_count == other.episode_count);
    CHECK(base.per_episode_accuracies == other.per_episode_accuracies);
    CHECK(base.tie_count == other.tie_count);
  }

  SUBCASE("real sequence metrics plug in unchanged") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto draw = [&]() {
      Matrix data(3, 2);
      for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 2; ++j) {
          data(i, j) = gauss(rng);
        }
      }
      return SegmentSequence(std::move(data));
    };
    std::vector<Episode> episodes;
    for (int e = 0; e < 2; ++e) {
      Episode episode;
      episode.n_way = 2;
      episode.k_shot = 1;
      episode.q_per_class = 1;
      const SegmentSequence a = draw();
      const SegmentSequence b = draw();
      episode.support.push_back({a, 0});
      episode.support.push_back({b, 1});
      episode.query.push_back({a, 0});
      episode.query.push_back({b, 1});
      episodes.push_back(std::move(episode));
    }
    const SequenceMetric agg = [](const SegmentSequence& a, const SegmentSequence& b) {
      return agg_distance(a, b);
    };
    const BenchmarkReport report = evaluate_benchmark(episodes, agg);
    CHECK(report.mean_accuracy == 1.0);
  }

  SUBCASE("fewer than two episodes is rejected") {
    std::vector<Episode> episodes;
    episodes.push_back(two_class_episode({1.0}, {2.0}, 1.0, 0));
    CHECK_THROWS_AS(evaluate_benchmark(episodes, absolute_gap_metric),
                    std::invalid_argument);
  }
}

TEST_CASE("episode validation rejects malformed shapes") {
  Episode episode = two_class_episode({1.0, 2.0}, {3.0, 4.0}, 0.0, 0);
  CHECK_NOTHROW(episode.validate());

  SUBCASE("support size mismatch") {
    episode.support.pop_back();
    CHECK_THROWS_AS(episode.validate(), std::invalid_argument);
  }

  SUBCASE("uneven shots per class") {
    episode.support[3].label = 0;
    CHECK_THROWS_AS(episode.validate(), std::invalid_argument);
  }

  SUBCASE("query label missing from the support") {
    episode.query[0].label = 42;
    CHECK_THROWS_AS(episode.validate(), std::invalid_argument);
  }

  SUBCASE("degenerate way or shot counts") {
    episode.n_way = 1;
    CHECK_THROWS_AS(episode.validate(), std::invalid_argument);
  }
}
