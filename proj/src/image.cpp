#include "foe/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "foe/errors.hpp"
#include "foe/rng.hpp"

namespace foe {

namespace {

bool is_pnm_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Header cursor over the raw bytes; all errors report the current offset.
struct Cursor {
  const std::string& bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "pgm: " << what << " at byte " << pos;
    throw ParseError(msg.str(), pos);
  }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_space_and_comments() {
    while (!eof()) {
      if (is_pnm_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what, long max_value) {
    skip_space_and_comments();
    if (eof() || bytes[pos] < '0' || bytes[pos] > '9') {
      fail(std::string("expected ") + what);
    }
    long value = 0;
    while (!eof() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > max_value) fail(std::string(what) + " too large");
      ++pos;
    }
    return value;
  }
};

}  // namespace

void validate_image(const Image& img) {
  if (img.width <= 0 || img.height <= 0) {
    throw std::invalid_argument("image: dimensions must be positive");
  }
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw std::invalid_argument("image: data length does not match dimensions");
  }
  for (double v : img.data) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("image: non-finite intensity");
    }
  }
}

Image read_pgm(const std::string& bytes) {
  Cursor cur{bytes};
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    cur.fail("not a P5/P2 PGM file");
  }
  const bool binary = bytes[1] == '5';
  cur.pos = 2;

  const long width = cur.read_uint("width", 1 << 20);
  const long height = cur.read_uint("height", 1 << 20);
  if (width == 0 || height == 0) cur.fail("zero image dimension");

  cur.skip_space_and_comments();
  const std::size_t maxval_at = cur.pos;
  const long maxval = cur.read_uint("maxval", std::numeric_limits<long>::max() / 16);
  if (maxval > 255) {
    std::ostringstream msg;
    msg << "pgm: maxval " << maxval << " exceeds 255 at byte " << maxval_at;
    throw ParseError(msg.str(), maxval_at);
  }
  if (maxval == 0) cur.fail("zero maxval");

  Image img(static_cast<int>(width), static_cast<int>(height));
  const std::size_t n = img.size();

  if (binary) {
    if (cur.eof() || !is_pnm_space(bytes[cur.pos])) {
      cur.fail("expected single whitespace byte before payload");
    }
    ++cur.pos;
    if (bytes.size() - cur.pos < n) {
      std::ostringstream msg;
      msg << "pgm: truncated payload at byte " << bytes.size() << " (need " << n
          << " bytes, have " << bytes.size() - cur.pos << ")";
      throw ParseError(msg.str(), bytes.size());
    }
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char b = static_cast<unsigned char>(bytes[cur.pos + i]);
      if (b > maxval) {
        cur.pos += i;
        cur.fail("pixel value exceeds maxval");
      }
      img.data[i] = static_cast<double>(b);
    }
    cur.pos += n;
    if (cur.pos != bytes.size()) cur.fail("trailing data after payload");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = cur.read_uint("pixel value", 255);
      if (v > maxval) cur.fail("pixel value exceeds maxval");
      img.data[i] = static_cast<double>(v);
    }
    cur.skip_space_and_comments();
    if (!cur.eof()) cur.fail("trailing data after pixels");
  }
  return img;
}

std::string write_pgm(const Image& img, bool ascii) {
  validate_image(img);
  std::string out;
  out += ascii ? "P2\n" : "P5\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";

  const auto quantize = [](double v) {
    if (!(v >= -0.5 && v < 255.5)) {
      std::ostringstream msg;
      msg << "pgm: intensity " << v << " outside [-0.5, 255.5); clamp before writing";
      throw RangeError(msg.str());
    }
    // Round half up: -0.5 maps to 0, 254.5 to 255.
    return std::min(255, static_cast<int>(std::floor(v + 0.5)));
  };

  if (ascii) {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        if (c > 0) out += ' ';
        out += std::to_string(quantize(img.at(r, c)));
      }
      out += '\n';
    }
  } else {
    out.reserve(out.size() + img.size());
    for (double v : img.data) {
      out += static_cast<char>(static_cast<unsigned char>(quantize(v)));
    }
  }
  return out;
}

Image read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failed: " + path);
  return read_pgm(buf.str());
}

void write_pgm_file(const Image& img, const std::string& path, bool ascii) {
  const std::string bytes = write_pgm(img, ascii);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

Image add_gaussian_noise(const Image& img, const NoiseSpec& spec) {
  validate_image(img);
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("noise: sigma must be > 0");
  GaussianStream stream(spec.seed);
  Image out = img;
  for (double& v : out.data) {
    v += spec.sigma * stream.next();
  }
  return out;
}

Image clamp_round(const Image& img) {
  validate_image(img);
  Image out = img;
  for (double& v : out.data) {
    v = std::min(255.0, std::max(0.0, std::round(v)));
  }
  return out;
}

double psnr(const Image& a, const Image& b) {
  validate_image(a);
  validate_image(b);
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum_sq += d * d;
  }
  const double mse = sum_sq / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

Image resize_scale(const Image& img, double scale) {
  validate_image(img);
  if (!(scale > 0.0)) throw std::invalid_argument("resize: scale must be > 0");
  const int out_w = std::max(1, static_cast<int>(std::llround(img.width * scale)));
  const int out_h = std::max(1, static_cast<int>(std::llround(img.height * scale)));
  Image out(out_w, out_h);

  if (scale >= 1.0) {
    // Nearest neighbor.
    for (int r = 0; r < out_h; ++r) {
      const int sr = std::min(img.height - 1, static_cast<int>(r / scale));
      for (int c = 0; c < out_w; ++c) {
        const int sc = std::min(img.width - 1, static_cast<int>(c / scale));
        out.at(r, c) = img.at(sr, sc);
      }
    }
  } else {
    // Box average over the source footprint of each output pixel.
    for (int r = 0; r < out_h; ++r) {
      const int r0 = std::min(img.height - 1, static_cast<int>(r / scale));
      const int r1 = std::max(r0 + 1, std::min(img.height, static_cast<int>((r + 1) / scale)));
      for (int c = 0; c < out_w; ++c) {
        const int c0 = std::min(img.width - 1, static_cast<int>(c / scale));
        const int c1 = std::max(c0 + 1, std::min(img.width, static_cast<int>((c + 1) / scale)));
        double acc = 0.0;
        for (int rr = r0; rr < r1; ++rr) {
          for (int cc = c0; cc < c1; ++cc) acc += img.at(rr, cc);
        }
        out.at(r, c) = acc / ((r1 - r0) * (c1 - c0));
      }
    }
  }
  return out;
}

}  // namespace foe
