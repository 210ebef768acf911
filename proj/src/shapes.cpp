#include "banach/shapes.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "banach/error.hpp"
#include "banach/serialize.hpp"

namespace banach {

namespace {

struct Primitive {
  std::string name;
  std::vector<double> args;
  bool subtract = false;
  std::size_t offset = 0;
};

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  fail(ErrorKind::ParseError, what + " at offset " + std::to_string(offset), {{"offset", offset}});
}

class ShapeLexer {
 public:
  explicit ShapeLexer(std::string_view text) : text_(text) {}

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ == text_.size();
  }
  std::size_t pos() const { return pos_; }
  char peek() {
    skip();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) parse_error(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) parse_error(start, "expected a shape name");
    return std::string(text_.substr(start, pos_ - start));
  }
  double number() {
    skip();
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) parse_error(pos_, "expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }
  std::string rest() {
    const std::string r(text_.substr(pos_));
    pos_ = text_.size();
    return r;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<Primitive> parse_terms(std::string_view text) {
  ShapeLexer lex(text);
  std::vector<Primitive> terms;
  bool subtract = false;
  for (;;) {
    Primitive p;
    p.offset = (lex.skip(), lex.pos());
    p.subtract = subtract;
    p.name = lex.word();
    if (p.name == "mask" && lex.peek() == ':') {
      lex.expect(':');
      p.name = "mask:" + lex.rest();
      terms.push_back(std::move(p));
      break;
    }
    lex.expect('(');
    if (lex.peek() != ')') {
      p.args.push_back(lex.number());
      while (lex.peek() == ',') {
        lex.expect(',');
        p.args.push_back(lex.number());
      }
    }
    lex.expect(')');
    terms.push_back(std::move(p));
    if (lex.done()) break;
    const char op = lex.peek();
    if (op != '+' && op != '-') parse_error(lex.pos(), "expected '+' or '-'");
    lex.expect(op);
    subtract = op == '-';
  }
  return terms;
}

void require_args(const Primitive& p, std::initializer_list<std::size_t> counts) {
  for (const auto c : counts)
    if (p.args.size() == c) return;
  parse_error(p.offset, "wrong number of arguments to " + p.name);
}

bool is_standalone(const std::string& name) {
  return name == "product" || name == "circle" || name.rfind("mask:", 0) == 0;
}

struct Region {
  Box box;
  std::function<bool(double, double)> inside;
};

Region region_of(const Primitive& p) {
  const auto& a = p.args;
  if (p.name == "disk") {
    require_args(p, {1, 3});
    const double r = a[0], cx = a.size() > 1 ? a[1] : 0.0, cy = a.size() > 1 ? a[2] : 0.0;
    if (!(r > 0)) parse_error(p.offset, "radius must be positive");
    return {{cx - r, cx + r, cy - r, cy + r}, [=](double x, double y) { return std::hypot(x - cx, y - cy) <= r; }};
  }
  if (p.name == "annulus") {
    require_args(p, {2, 4});
    const double r1 = a[0], r2 = a[1], cx = a.size() > 2 ? a[2] : 0.0, cy = a.size() > 2 ? a[3] : 0.0;
    if (!(r1 >= 0 && r2 > r1)) parse_error(p.offset, "annulus needs 0 <= r1 < r2");
    return {{cx - r2, cx + r2, cy - r2, cy + r2}, [=](double x, double y) {
              const double r = std::hypot(x - cx, y - cy);
              return r >= r1 && r <= r2;
            }};
  }
  if (p.name == "rect") {
    require_args(p, {4});
    const double x0 = a[0], x1 = a[1], y0 = a[2], y1 = a[3];
    if (!(x1 > x0 && y1 > y0)) parse_error(p.offset, "rect needs x0 < x1 and y0 < y1");
    return {{x0, x1, y0, y1}, [=](double x, double y) { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }};
  }
  if (p.name == "interval") {
    require_args(p, {2});
    const double lo = a[0], hi = a[1];
    if (!(hi > lo)) parse_error(p.offset, "interval needs a < b");
    return {{lo, hi, 0.0, 0.0}, [=](double x, double) { return x >= lo && x <= hi; }};
  }
  parse_error(p.offset, "unknown shape '" + p.name + "'");
}

RasterDomain load_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot read mask file '" + path + "'");
  try {
    return domain_from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, "mask file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

RasterDomain rasterize_shape(std::string_view text, double h) {
  const auto terms = parse_terms(text);
  if (terms.size() == 1 && terms[0].name.rfind("mask:", 0) == 0) return load_mask(terms[0].name.substr(5));
  std::vector<Region> regions;
  int dim = 0;
  for (const auto& t : terms) {
    if (is_standalone(t.name)) parse_error(t.offset, "'" + t.name.substr(0, t.name.find(':')) + "' cannot be combined");
    const int d = t.name == "interval" ? 1 : 2;
    if (dim != 0 && d != dim) parse_error(t.offset, "intervals and planar shapes cannot be mixed");
    dim = d;
    regions.push_back(region_of(t));
  }
  if (terms.front().subtract) parse_error(terms.front().offset, "a shape cannot start with a difference");
  Box box{1e300, -1e300, 1e300, -1e300};
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].subtract) continue;
    box.xmin = std::min(box.xmin, regions[k].box.xmin);
    box.xmax = std::max(box.xmax, regions[k].box.xmax);
    box.ymin = std::min(box.ymin, regions[k].box.ymin);
    box.ymax = std::max(box.ymax, regions[k].box.ymax);
  }
  return RasterDomain::rasterize(dim, box, h, [&](double x, double y) {
    bool in = false;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (terms[k].subtract) {
        if (in && regions[k].inside(x, y)) in = false;
      } else if (!in && regions[k].inside(x, y)) {
        in = true;
      }
    }
    return in;
  });
}

Instance instance_from_shape(std::string_view text, Field field, double h) {
  const auto terms = parse_terms(text);
  const Primitive& first = terms.front();
  if (first.name == "product" || first.name == "circle") {
    if (terms.size() != 1) parse_error(terms[1].offset, "'" + first.name + "' cannot be combined");
    require_args(first, {1});
    const double v = first.args[0];
    if (v != std::floor(v) || v < 1 || v > 1e8) parse_error(first.offset, "count must be a positive integer");
    return first.name == "product" ? AlgebraInstance::finite_product(field, static_cast<int>(v))
                                   : AlgebraInstance::circle(field, static_cast<int>(v));
  }
  return AlgebraInstance::grid(field, rasterize_shape(text, h));
}

}  // namespace banach
