#include "crackscan/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "crackscan/error.hpp"
#include "json.hpp"

namespace crackscan {

std::string to_string(Channels c) {
  return c == Channels::binary ? "binary" : "grayscale";
}

Channels channels_from_string(const std::string& s) {
  if (s == "binary") return Channels::binary;
  if (s == "grayscale") return Channels::grayscale;
  throw std::invalid_argument("unknown channels kind: " + s);
}

RasterImage RasterImage::make(int width, int height, Channels ch, double fill) {
  RasterImage img;
  img.width = width;
  img.height = height;
  img.channels = ch;
  img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

std::size_t RasterImage::count_nonzero() const {
  return static_cast<std::size_t>(
      std::count_if(pixels.begin(), pixels.end(), [](double v) { return v != 0.0; }));
}

namespace {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size()) throw ParseError("unexpected end of PGM header", pos);
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

long parse_header_int(const std::string& data, std::size_t& pos, const char* what) {
  const std::size_t at = pos;
  const std::string tok = next_token(data, pos);
  try {
    std::size_t used = 0;
    const long value = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw ParseError(std::string("invalid PGM ") + what + " field '" + tok + "'", at);
  }
}

}  // namespace

void save_raster(const RasterImage& img, const std::string& path) {
  const bool binary = img.channels == Channels::binary;
  double vmin = 0.0;
  double vmax = 1.0;
  if (!binary && !img.pixels.empty()) {
    const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    vmin = *lo;
    vmax = *hi;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open raster file for writing: " + path);
  const int maxval = binary ? 255 : 65535;
  out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  if (binary) {
    std::vector<std::uint8_t> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = img.pixels[i] != 0.0 ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  } else {
    const double range = vmax > vmin ? vmax - vmin : 1.0;
    std::vector<std::uint8_t> buf(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double norm = (img.pixels[i] - vmin) / range;
      const auto raw = static_cast<std::uint16_t>(std::lround(std::clamp(norm, 0.0, 1.0) * 65535.0));
      buf[2 * i] = static_cast<std::uint8_t>(raw >> 8);
      buf[2 * i + 1] = static_cast<std::uint8_t>(raw & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw std::runtime_error("failed writing raster file: " + path);

  nlohmann::json side{{"channels", to_string(img.channels)},
                      {"scale_mm_per_px", img.scale_mm_per_px},
                      {"origin", img.origin},
                      {"value_min", vmin},
                      {"value_max", vmax}};
  std::ofstream sout(path + ".json");
  if (!sout) throw std::runtime_error("cannot open sidecar for writing: " + path + ".json");
  sout << side.dump(2) << "\n";
}

RasterImage load_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open raster file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  std::size_t pos = 0;
  const std::string magic = next_token(data, pos);
  if (magic != "P5") throw ParseError("not a raw PGM file (expected P5, got '" + magic + "')", 0);
  const long width = parse_header_int(data, pos, "width");
  const long height = parse_header_int(data, pos, "height");
  const long maxval = parse_header_int(data, pos, "maxval");
  if (width <= 0 || height <= 0) throw ParseError("non-positive PGM dimensions", pos);
  if (maxval != 255 && maxval != 65535) throw ParseError("unsupported PGM maxval", pos);
  if (pos >= data.size()) throw ParseError("missing pixel data", pos);
  ++pos;  // single whitespace byte after maxval

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t bytes_per_px = maxval == 255 ? 1 : 2;
  if (data.size() - pos < n * bytes_per_px)
    throw ParseError("truncated PGM pixel data", data.size());

  const std::string sidecar_path = path + ".json";
  std::ifstream side_in(sidecar_path);
  if (!side_in)
    throw std::runtime_error("missing raster sidecar: " + sidecar_path);
  nlohmann::json side;
  try {
    side_in >> side;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid raster sidecar " + sidecar_path + ": " + e.what());
  }

  RasterImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = channels_from_string(side.at("channels").get<std::string>());
  img.scale_mm_per_px = side.at("scale_mm_per_px").get<double>();
  img.origin = side.at("origin").get<Point3>();
  img.pixels.resize(n);

  const double vmin = side.value("value_min", 0.0);
  const double vmax = side.value("value_max", 1.0);
  const double range = vmax > vmin ? vmax - vmin : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bytes_per_px == 1) {
      const auto raw = static_cast<std::uint8_t>(data[pos + i]);
      img.pixels[i] = img.channels == Channels::binary ? (raw != 0 ? 1.0 : 0.0)
                                                       : vmin + range * raw / 255.0;
    } else {
      const auto hi = static_cast<std::uint8_t>(data[pos + 2 * i]);
      const auto lo = static_cast<std::uint8_t>(data[pos + 2 * i + 1]);
      const auto raw = static_cast<std::uint16_t>((hi << 8) | lo);
      img.pixels[i] = img.channels == Channels::binary ? (raw != 0 ? 1.0 : 0.0)
                                                       : vmin + range * raw / 65535.0;
    }
  }
  return img;
}

}  // namespace crackscan
