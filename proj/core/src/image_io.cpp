#include "namo/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace namo {

namespace {

constexpr int kMaxSample = 65535;

void write_header(std::ostream& out, int width, int height, const char* comment) {
  out << "P5\n# " << comment << '\n' << width << ' ' << height << '\n' << kMaxSample << '\n';
}

void put_sample(std::ostream& out, int value) {
  out.put(static_cast<char>((value >> 8) & 0xff));
  out.put(static_cast<char>(value & 0xff));
}

/// Next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) {
        return token;
      }
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

struct Header {
  int width{0};
  int height{0};
};

Header read_header(std::istream& in) {
  if (next_token(in) != "P5") {
    throw std::runtime_error("not a binary PGM");
  }
  Header h;
  try {
    h.width = std::stoi(next_token(in));
    h.height = std::stoi(next_token(in));
    if (std::stoi(next_token(in)) != kMaxSample) {
      throw std::runtime_error("expected a 16-bit PGM");
    }
  } catch (const std::logic_error&) {
    throw std::runtime_error("malformed PGM header");
  }
  if (h.width <= 0 || h.height <= 0) {
    throw std::runtime_error("PGM dimensions must be positive");
  }
  return h;
}

int get_sample(std::istream& in) {
  const int hi = in.get();
  const int lo = in.get();
  if (hi == std::char_traits<char>::eof() || lo == std::char_traits<char>::eof()) {
    throw std::runtime_error("PGM pixel data truncated");
  }
  return (hi << 8) | lo;
}

}  // namespace

void write_depth_pgm(const DepthImage& depth, std::ostream& out) {
  write_header(out, depth.width, depth.height, "namo depth scale=0.001");
  for (double z : depth.depth) {
    const long mm = std::lround(std::clamp(z, 0.0, kMaxSample / 1000.0) * 1000.0);
    put_sample(out, static_cast<int>(mm));
  }
}

DepthImage read_depth_pgm(std::istream& in) {
  const Header h = read_header(in);
  DepthImage depth(h.width, h.height);
  for (double& z : depth.depth) {
    z = get_sample(in) / 1000.0;
  }
  return depth;
}

void write_mask_pgm(const SegmentationMask& mask, std::ostream& out) {
  for (std::int32_t id : mask.labels) {
    if (id < 0 || id > kMaxSample) {
      throw std::invalid_argument("mask id " + std::to_string(id) + " does not fit 16 bits");
    }
  }
  write_header(out, mask.width, mask.height, "namo mask");
  for (std::int32_t id : mask.labels) {
    put_sample(out, id);
  }
}

SegmentationMask read_mask_pgm(std::istream& in) {
  const Header h = read_header(in);
  SegmentationMask mask(h.width, h.height);
  for (std::int32_t& id : mask.labels) {
    id = get_sample(in);
  }
  return mask;
}

}  // namespace namo
