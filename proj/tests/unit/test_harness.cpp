#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "arcfbp/harness.hpp"

using namespace arcfbp;
namespace fs = std::filesystem;

namespace {

// Uniform disk round trip at reduced size: 64^2 grid at 8 mm, 2 deg views.
// Observed 24.93 dB; the error is dominated by partial-volume edge pixels.
constexpr double kDiskRoundTripPsnrFloor = 24.5;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("arcfbp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return harness::run_cli(args, out_, err_);
    }

    [[nodiscard]] std::vector<std::string> files() const {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dir_)) names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        return names;
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

const std::vector<std::string> kSmallGrid{"--nx", "64", "--ny", "64", "--spacing", "8"};

std::vector<std::string> with_grid(std::vector<std::string> a) {
    a.insert(a.end(), kSmallGrid.begin(), kSmallGrid.end());
    return a;
}

}  // namespace

TEST(HarnessDefaults, GeometriesValidate) {
    for (auto k : {DetectorKind::FanCurved, DetectorKind::FanStraight, DetectorKind::ConeFlat, DetectorKind::ConeCurved})
        EXPECT_NO_THROW(harness::default_geometry(k).validate()) << to_string(k);
    EXPECT_EQ(harness::default_grid(DetectorKind::ConeFlat).nz, 16);
    EXPECT_DOUBLE_EQ(harness::default_eval_radius(256.0), 230.4);
}

TEST(HarnessDefaults, GeometryOptionsConvertDegrees) {
    harness::GeometryOptions o;
    o.lambda_end = 230.0;
    o.lambda_step = 0.25;
    o.detector_step = 0.05;
    o.detector_half = 720;
    const ScanGeometry g = o.build();
    EXPECT_EQ(g.last_view(), 920);
    EXPECT_NEAR(g.columns.step, deg2rad(0.05), 1e-15);
    o.lambda_end = 230.1;
    o.lambda_step = 1.0;
    EXPECT_THROW((void)o.build(), Error);
}

TEST(HarnessDefaults, ParsePoint) {
    const Vec2 p = harness::parse_point("-12.5,3");
    EXPECT_EQ(p.x, -12.5);
    EXPECT_EQ(p.y, 3.0);
    EXPECT_THROW(harness::parse_point("1;2"), Error);
    EXPECT_THROW(harness::parse_point("1,"), Error);
    EXPECT_THROW(harness::parse_point("a,2"), Error);
}

TEST_F(Cli, DiskRoundTrip) {
    ASSERT_EQ(run(with_grid({"phantom", "--type", "disk", "--radius", "200", "--out", path("disk.txt"), "--truth", path("truth")})),
              0)
        << err_.str();
    ASSERT_EQ(run({"project", "--phantom", path("disk.txt"), "--out", path("proj"), "--lambda-step", "2",
                   "--lambda-end", "252"}),
              0)
        << err_.str();
    ASSERT_EQ(
        run(with_grid({"--workers", "4", "recon", "--in", path("proj"), "--out", path("rec"), "--pgm", path("rec.pgm")})),
        0)
        << err_.str();
    ASSERT_EQ(run({"eval", "--recon", path("rec"), "--truth", path("truth"), "--out", path("eval.txt"), "--csv",
                   path("eval.csv")}),
              0)
        << err_.str();
    const Metadata rep = Metadata::parse(out_.str());
    EXPECT_EQ(rep.get("algorithm"), "arc");
    const double psnr_db = rep.get_double("psnr_db");
    EXPECT_GT(psnr_db, kDiskRoundTripPsnrFloor);
    EXPECT_EQ(read_text_file(path("eval.txt")), out_.str());

    const Metadata meta = Metadata::parse(read_text_file(path("rec.meta")));
    for (const char* key : {"geometry", "algorithm", "version", "lambda_step", "noise", "nx", "truncated"})
        EXPECT_TRUE(meta.has(key)) << key;
    EXPECT_FALSE(meta.has("workers"));
    EXPECT_EQ(read_text_file(path("rec.pgm")).rfind("P5\n64 64\n255\n", 0), 0u);
}

TEST_F(Cli, UnknownAlgorithmListsValidNames) {
    ASSERT_EQ(run({"phantom", "--out", path("sl.txt")}), 0) << err_.str();
    ASSERT_EQ(run({"project", "--phantom", path("sl.txt"), "--out", path("proj"), "--lambda-step", "4"}), 0);
    EXPECT_NE(run({"recon", "--in", path("proj"), "--out", path("rec"), "--algorithm", "sart"}), 0);
    EXPECT_NE(err_.str().find("arc, ace, cfa, fdk"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(path("rec.raw")));
}

TEST_F(Cli, MalformedSidecarLeavesNoOutputs) {
    ASSERT_EQ(run({"phantom", "--out", path("sl.txt")}), 0);
    ASSERT_EQ(run({"project", "--phantom", path("sl.txt"), "--out", path("proj"), "--lambda-step", "4"}), 0);
    const auto before = files();
    write_text_file(path("proj.meta"), read_text_file(path("proj.meta")) + "this line is not key value\n");
    EXPECT_NE(run({"recon", "--in", path("proj"), "--out", path("rec"), "--pgm", path("rec.pgm")}), 0);
    EXPECT_NE(err_.str().find("expected key=value"), std::string::npos) << err_.str();
    EXPECT_NE(run({"noise", "--in", path("proj"), "--out", path("noisy")}), 0);
    EXPECT_EQ(files(), before);
}

TEST_F(Cli, ShapeMismatchIsDescriptive) {
    ASSERT_EQ(run(with_grid({"phantom", "--truth", path("a")})), 0);
    ASSERT_EQ(run({"phantom", "--truth", path("b"), "--nx", "32", "--ny", "32", "--spacing", "16"}), 0);
    EXPECT_NE(run({"eval", "--recon", path("a"), "--truth", path("b")}), 0);
    EXPECT_NE(err_.str().find("64x64x1"), std::string::npos) << err_.str();
    EXPECT_NE(err_.str().find("32x32x1"), std::string::npos) << err_.str();
}

TEST_F(Cli, NoiseIsDeterministicAcrossWorkers) {
    ASSERT_EQ(run({"phantom", "--out", path("sl.txt")}), 0);
    ASSERT_EQ(run({"project", "--phantom", path("sl.txt"), "--out", path("proj"), "--lambda-step", "4"}), 0);
    for (const char* w : {"1", "4", "8"})
        ASSERT_EQ(run({"--workers", w, "noise", "--in", path("proj"), "--out", path(std::string("n") + w), "--var", "10",
                       "--seed", "5"}),
                  0)
            << err_.str();
    const std::string ref = read_text_file(path("n1.raw"));
    EXPECT_EQ(read_text_file(path("n4.raw")), ref);
    EXPECT_EQ(read_text_file(path("n8.raw")), ref);
    EXPECT_EQ(read_text_file(path("n4.meta")), read_text_file(path("n1.meta")));
    EXPECT_NE(read_text_file(path("proj.raw")), ref);
    const Metadata m = Metadata::parse(read_text_file(path("n1.meta")));
    EXPECT_EQ(m.get("noise_seed"), "5");
    EXPECT_EQ(m.get("noise_mode"), "photon-count");
}

TEST_F(Cli, SweepWritesCsv) {
    ASSERT_EQ(run(with_grid({"sweep", "--lambda-ends", "200,240", "--lambda-step", "4", "--algorithms", "arc,cfa",
                             "--out", path("sweep.csv")})),
              0)
        << err_.str();
    std::istringstream in(read_text_file(path("sweep.csv")));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "lambda_end_deg,variance,algorithm,psnr_db,ssim,rmse,data_range,roi_radius,roi_pixels");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_NE(line.find(",none,"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 4);
}

TEST_F(Cli, ProfileAlongRow) {
    ASSERT_EQ(run(with_grid({"phantom", "--type", "disk", "--radius", "200", "--truth", path("t")})), 0);
    ASSERT_EQ(run({"profile", "--image", path("t"), "--from", "-100,4", "--to", "100,4", "--samples", "5"}), 0)
        << err_.str();
    std::istringstream in(out_.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "distance,value");
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        EXPECT_NE(line.find(",1"), std::string::npos) << line;
    }
    EXPECT_EQ(n, 5);
    EXPECT_NE(run({"profile", "--image", path("t"), "--from", "-400,0", "--to", "0,0"}), 0);
}

TEST_F(Cli, UsageErrorsFail) {
    EXPECT_NE(run({}), 0);
    EXPECT_NE(run({"recon"}), 0);
    EXPECT_NE(run({"frobnicate"}), 0);
    EXPECT_EQ(run({"--version"}), 0);
    EXPECT_NE(out_.str().find(kVersion), std::string::npos);
}
