#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "crackscan/error.hpp"
#include "crackscan/raster.hpp"
#include "doctest.h"

using namespace crackscan;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "crackscan_raster_tests";
  fs::create_directories(dir);
  return dir / name;
}

RasterImage random_mask(std::mt19937& rng, int w, int h) {
  RasterImage img = RasterImage::make(w, h, Channels::binary);
  std::bernoulli_distribution bit(0.3);
  for (double& v : img.pixels) v = bit(rng) ? 1.0 : 0.0;
  img.scale_mm_per_px = 0.5;
  img.origin = {1.0, 2.0, 3.0, Frame::world};
  return img;
}

}  // namespace

TEST_SUITE("raster") {
  TEST_CASE("binary raster round-trips bit exact") {
    std::mt19937 rng(5);
    for (int i = 0; i < 5; ++i) {
      const RasterImage img = random_mask(rng, 37, 23);
      const auto path = temp_file("mask.pgm");
      save_raster(img, path.string());
      const RasterImage back = load_raster(path.string());
      CHECK(back == img);
    }
  }

  TEST_CASE("grayscale raster survives within quantisation") {
    RasterImage img = RasterImage::make(16, 8, Channels::grayscale);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> val(4.0, 12.0);
    for (double& v : img.pixels) v = val(rng);
    const auto path = temp_file("gray.pgm");
    save_raster(img, path.string());
    const RasterImage back = load_raster(path.string());
    const double quantum = (12.0 - 4.0) / 65535.0;
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= quantum);
    CHECK(back.scale_mm_per_px == img.scale_mm_per_px);
  }

  TEST_CASE("truncated pixel data reports the byte offset") {
    const auto path = temp_file("trunc.pgm");
    {
      std::ofstream out(path, std::ios::binary);
      out << "P5\n10 10\n255\n";
      out << "only a few bytes";
    }
    {
      std::ofstream side(path.string() + ".json");
      side << R"({"channels":"binary","scale_mm_per_px":1.0,)"
           << R"("origin":{"xyz_mm":[0,0,0],"frame":"world"}})";
    }
    CHECK_THROWS_AS(load_raster(path.string()), ParseError);
    try {
      load_raster(path.string());
    } catch (const ParseError& e) {
      CHECK(e.byte_offset() > 0);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }

  TEST_CASE("wrong magic is a parse error at offset zero") {
    const auto path = temp_file("magic.pgm");
    std::ofstream(path, std::ios::binary) << "P2\n2 2\n255\n0 0 0 0";
    CHECK_THROWS_AS(load_raster(path.string()), ParseError);
  }

  TEST_CASE("missing sidecar error names the sidecar file") {
    const auto path = temp_file("nosidecar.pgm");
    RasterImage img = RasterImage::make(4, 4, Channels::binary);
    save_raster(img, path.string());
    fs::remove(path.string() + ".json");
    try {
      load_raster(path.string());
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("nosidecar.pgm.json") != std::string::npos);
    }
  }
}
