#include <gtest/gtest.h>

#include "sceneforge/eval.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

const std::vector<std::string>& suite() {
  static const auto d = load_descriptions(sftest::kData + "/descriptions.txt");
  return d;
}

}  // namespace

TEST(Eval, SuiteLoads) {
  EXPECT_EQ(suite().size(), 20u);
  const std::string path = ::testing::TempDir() + "blank.txt";
  detail::write_file(path, "# nothing\n\n");
  try {
    load_descriptions(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_input);
  }
}

TEST(Eval, RowsIndependentOfThreadCount) {
  EvalOptions opt;
  opt.seeds = {1, 2};
  opt.threads = 1;
  const auto one = run_eval(suite(), sftest::catalog(), sftest::kb(), opt);
  opt.threads = 4;
  const auto four = run_eval(suite(), sftest::catalog(), sftest::kb(), opt);
  ASSERT_EQ(one.size(), 80u);
  EXPECT_EQ(eval_csv(one), eval_csv(four));
  EXPECT_EQ(one[0].condition, Condition::basic);
  EXPECT_EQ(one[1].seed, 2u);
  EXPECT_EQ(one[2].description, 1);
}

TEST(Eval, CsvShape) {
  EvalOptions opt;
  opt.seeds = {3};
  opt.conditions = {Condition::full};
  const auto rows = run_eval({suite()[0], suite()[1]}, sftest::catalog(), sftest::kb(), opt);
  const std::string csv = eval_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kEvalCsvHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.find("\nfull,0,3,"), csv.find('\n'));
}

TEST(Eval, SummaryAggregates) {
  std::vector<EvalRow> rows(3);
  rows[0].metrics.explicitConstraints = 2;
  rows[0].metrics.constraintSatisfaction = 0.5;
  rows[1].metrics.explicitConstraints = 1;
  rows[1].metrics.constraintSatisfaction = 1.0;
  rows[1].metrics.collisions = 2;
  rows[2].metrics.degraded = true;
  rows[2].metrics.supportValidity = 0.0;
  rows[2].score.L = 3.0;
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].rows, 3);
  EXPECT_DOUBLE_EQ(s[0].constraintSatisfaction, 0.75);
  EXPECT_EQ(s[0].collisions, 2);
  EXPECT_EQ(s[0].degraded, 1);
  EXPECT_DOUBLE_EQ(s[0].supportValidity, 1.0);
  EXPECT_DOUBLE_EQ(s[0].L, 1.0);
}
