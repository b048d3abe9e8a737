#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "palm_forge/errors.hpp"
#include "palm_forge/io.hpp"

using namespace palm_forge;

TEST(Io, ConfigRoundTrip) {
  const PointConfig c(Window::centered(GroupDomain::real_line(), -2, 3), {{-1.25, 1}, {0, 2.5}, {0.1, 1}});
  const std::string text = config_to_json(c);
  EXPECT_EQ(text, R"({"atoms":[[-1.25,1.0],[0.0,2.5],[0.1,1.0]],"domain":"real","window":[-2.0,3.0]})");
  EXPECT_EQ(config_from_json(text), c);

  const PointConfig z(Window::full(GroupDomain::cyclic(12)), {{0, 12}});
  EXPECT_EQ(config_from_json(config_to_json(z)), z);
}

TEST(Io, MalformedConfig) {
  EXPECT_THROW(config_from_json("{"), PreconditionError);
  EXPECT_THROW(config_from_json(R"({"domain":"real"})"), PreconditionError);
  EXPECT_THROW(config_from_json(R"({"domain":"real","window":[-1,1],"atoms":[[0.5,-1]]})"), PreconditionError);
}

TEST(Io, BatchJsonLinesRoundTrip) {
  const SampleBatch batch = sample_palm_batch(PalmSource::parse("poisson:lambda=2"),
                                              Window::symmetric(GroupDomain::real_line(), 5), 20, RandomStream(1));
  std::stringstream buffer;
  write_batch_jsonl(buffer, batch);
  const SampleBatch back = read_batch_jsonl(buffer, BatchRole::PalmSide);
  ASSERT_EQ(back.size(), batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(back.items()[i].config, batch.items()[i].config);
    EXPECT_EQ(back.items()[i].weight, batch.items()[i].weight);
  }
  std::stringstream bad("{\"weight\": 1}\n");
  EXPECT_THROW(read_batch_jsonl(bad, BatchRole::PalmSide), PreconditionError);
}

TEST(Io, CsvLines) {
  EXPECT_EQ(kCsvHeader, "scenario,estimator,value,se,n,seed,verdict");
  const CsvRow row{"a,b", "mass", 0.1, 0.0, 10, 7, "pass"};
  EXPECT_EQ(csv_line(row), "\"a,b\",mass,0.10000000000000001,0,10,7,pass");
  EXPECT_EQ(csv_line({"s", "z", INFINITY, 0, 1, 2, "fail"}), "s,z,inf,0,1,2,fail");
}

TEST(Io, ReportJsonAndRows) {
  TestReport r;
  r.scenario = "demo";
  r.test = "mecke";
  r.n = 3;
  r.seed = 9;
  r.entries.push_back({"f1", 1, 1, 0, 0, INFINITY, 1, false});
  const std::string text = report_to_json(r, -1);
  EXPECT_NE(text.find("\"z\":\"inf\""), std::string::npos);
  EXPECT_NE(text.find("\"verdict\":\"fail\""), std::string::npos);
  const auto rows = report_rows(r);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].estimator, "mecke:f1");
  EXPECT_EQ(rows[0].verdict, "fail");
}
