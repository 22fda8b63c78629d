#include "ffsing/textio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ffsing/error.hpp"

namespace ffsing {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

// Non-empty lines with comments stripped, split on whitespace.
class Lines {
 public:
  explicit Lines(std::string_view text) {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++number;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      std::istringstream in{std::string(raw)};
      Line line{number, {}};
      for (std::string tok; in >> tok;) line.tokens.push_back(tok);
      if (!line.tokens.empty()) lines_.push_back(std::move(line));
      start = end + 1;
    }
  }

  bool done() const noexcept { return pos_ >= lines_.size(); }
  const Line& peek() const {
    if (done()) throw ParseError("unexpected end of input");
    return lines_[pos_];
  }
  const Line& next() {
    const Line& l = peek();
    ++pos_;
    return l;
  }
  void expect_done() const {
    if (!done()) fail(lines_[pos_], "unexpected trailing content");
  }

  [[noreturn]] static void fail(const Line& line, const std::string& what) {
    throw ParseError(fmt::format("line {}: {}", line.number, what));
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename F>
bool try_float(std::string_view s, F& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

int int_at(const Line& line, std::size_t i) {
  int v = 0;
  if (i >= line.tokens.size() || !parse_int(line.tokens[i], v)) {
    Lines::fail(line, "expected an integer");
  }
  return v;
}

template <typename F = double>
F number_at(const Line& line, std::size_t i) {
  F v = 0;
  if (i >= line.tokens.size() || !try_float(line.tokens[i], v)) {
    Lines::fail(line, "expected a number");
  }
  return v;
}

double double_at(const Line& line, std::size_t i) { return number_at<double>(line, i); }
Real real_at(const Line& line, std::size_t i) { return number_at<Real>(line, i); }

template <typename F>
std::string shortest(F x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void expect_keywords(const Line& line, std::initializer_list<std::pair<std::size_t, const char*>> kws,
                     std::size_t size) {
  if (line.tokens.size() != size) Lines::fail(line, "wrong number of fields");
  for (const auto& [i, kw] : kws) {
    if (line.tokens[i] != kw) Lines::fail(line, fmt::format("expected '{}'", kw));
  }
}

int checked_order(const Line& line, int k) {
  if (k < 0 || k > kMaxOrder) Lines::fail(line, fmt::format("order must lie in [0, {}]", kMaxOrder));
  return k;
}

bool starts_numeric(const Line& line) {
  int v = 0;
  return parse_int(line.tokens.front(), v);
}

Jet2 read_jet(Lines& lines) {
  const Line& head = lines.next();
  expect_keywords(head, {{0, "order"}}, 2);
  Jet2 jet(checked_order(head, int_at(head, 1)));
  while (!lines.done() && starts_numeric(lines.peek())) {
    const Line& l = lines.next();
    if (l.tokens.size() != 4) Lines::fail(l, "expected 'p q re im'");
    const int p = int_at(l, 0);
    const int q = int_at(l, 1);
    if (p < 0 || q < 0 || p + q > jet.order()) Lines::fail(l, "monomial beyond jet order");
    jet.at(p, q) = {real_at(l, 2), real_at(l, 3)};
  }
  return jet;
}

Jet4 read_jet4(Lines& lines) {
  const Line& head = lines.next();
  expect_keywords(head, {{0, "order4"}}, 2);
  const int k = int_at(head, 1);
  if (k < 0 || k > 2 * kMaxOrder) Lines::fail(head, "order4 out of range");
  Jet4 jet(k);
  while (!lines.done() && starts_numeric(lines.peek())) {
    const Line& l = lines.next();
    if (l.tokens.size() != 6) Lines::fail(l, "expected 'a b c d re im'");
    Jet4::Index idx{};
    int total = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      idx[i] = int_at(l, i);
      if (idx[i] < 0) Lines::fail(l, "negative exponent");
      total += idx[i];
    }
    if (total > k) Lines::fail(l, "monomial beyond jet order");
    jet.add(idx, Complex{real_at(l, 4), real_at(l, 5)} - jet(idx));
  }
  return jet;
}

std::vector<Jet2> read_jets(Lines& lines, int count, int order) {
  std::vector<Jet2> jets;
  for (int i = 0; i < count; ++i) {
    const Line& head = lines.peek();
    Jet2 jet = read_jet(lines);
    if (jet.order() != order) Lines::fail(head, "jet order differs from the header");
    jets.push_back(std::move(jet));
  }
  lines.expect_done();
  return jets;
}

}  // namespace

std::string format_double(double x) { return shortest(x); }
std::string format_real(Real x) { return shortest(x); }

double parse_double(std::string_view text) {
  double v = 0.0;
  if (!try_float(text, v)) throw ParseError(fmt::format("not a number: '{}'", text));
  return v;
}

Real parse_real(std::string_view text) {
  Real v = 0.0;
  if (!try_float(text, v)) throw ParseError(fmt::format("not a number: '{}'", text));
  return v;
}

Jet2 parse_jet(std::string_view text) {
  Lines lines(text);
  Jet2 jet = read_jet(lines);
  lines.expect_done();
  return jet;
}

std::string format_jet(const Jet2& jet) {
  std::string out = fmt::format("order {}\n", jet.order());
  for (int d = 0; d <= jet.order(); ++d) {
    for (int q = 0; q <= d; ++q) {
      const Complex c = jet(d - q, q);
      if (c == Complex{}) continue;
      out += fmt::format("{} {} {} {}\n", d - q, q, format_real(c.real()), format_real(c.imag()));
    }
  }
  return out;
}

Jet4 parse_jet4(std::string_view text) {
  Lines lines(text);
  Jet4 jet = read_jet4(lines);
  lines.expect_done();
  return jet;
}

std::string format_jet4(const Jet4& jet) {
  std::string out = fmt::format("order4 {}\n", jet.order());
  for (const auto& [idx, c] : jet.terms()) {
    if (c == Complex{}) continue;
    out += fmt::format("{} {} {} {} {} {}\n", idx[0], idx[1], idx[2], idx[3], format_real(c.real()),
                       format_real(c.imag()));
  }
  return out;
}

std::string format_lift(const LiftPair& lift) {
  return "component 1\n" + format_jet4(lift.first) + "component 2\n" + format_jet4(lift.second);
}

GluingTuple parse_gluing_tuple(std::string_view text) {
  Lines lines(text);
  const Line& head = lines.next();
  expect_keywords(head, {{0, "n"}, {2, "order"}}, 4);
  const int n = int_at(head, 1);
  if (n < 2) Lines::fail(head, "a gluing tuple needs n >= 2");
  const int k = checked_order(head, int_at(head, 3));
  std::vector<DiffeoJet> maps;
  for (auto& jet : read_jets(lines, n - 1, k)) maps.emplace_back(std::move(jet));
  return GluingTuple(std::move(maps));
}

std::string format_gluing_tuple(const GluingTuple& tuple) {
  std::string out = fmt::format("n {} order {}\n", tuple.points(), tuple.order());
  for (const auto& m : tuple.maps()) out += format_jet(m.jet());
  return out;
}

GaugeTuple parse_gauge_tuple(std::string_view text) {
  Lines lines(text);
  const Line& head = lines.next();
  expect_keywords(head, {{0, "gauge"}, {1, "n"}, {3, "order"}}, 5);
  const int n = int_at(head, 2);
  if (n < 2) Lines::fail(head, "a gauge tuple needs n >= 2");
  const int k = checked_order(head, int_at(head, 4));
  std::vector<DiffeoJet> elems;
  for (auto& jet : read_jets(lines, n, k)) elems.emplace_back(std::move(jet));
  return GaugeTuple(std::move(elems));
}

std::string format_gauge_tuple(const GaugeTuple& tuple) {
  std::string out = fmt::format("gauge n {} order {}\n", tuple.size(), tuple.order());
  for (const auto& e : tuple.elems()) out += format_jet(e.jet());
  return out;
}

HessianForm parse_hessian(std::string_view text) {
  Lines lines(text);
  const Line& head = lines.next();
  expect_keywords(head, {{0, "hessian"}}, 1);
  std::vector<double> values;
  while (!lines.done()) {
    const Line& l = lines.next();
    for (std::size_t i = 0; i < l.tokens.size(); ++i) values.push_back(double_at(l, i));
  }
  if (values.size() != 32) {
    throw ParseError(fmt::format("hessian needs 32 numbers, got {}", values.size()));
  }
  HessianForm h;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      h.q1(r, c) = values[static_cast<std::size_t>(4 * r + c)];
      h.q2(r, c) = values[static_cast<std::size_t>(16 + 4 * r + c)];
    }
  }
  return h;
}

std::string format_hessian(const HessianForm& h) {
  std::string out = "hessian\n";
  for (const Eigen::Matrix4d* q : {&h.q1, &h.q2}) {
    for (int r = 0; r < 4; ++r) {
      out += fmt::format("{} {} {} {}\n", format_double((*q)(r, 0)), format_double((*q)(r, 1)),
                         format_double((*q)(r, 2)), format_double((*q)(r, 3)));
    }
  }
  return out;
}

Complex parse_complex(std::string_view text) {
  const auto bad = [&] { return ParseError(fmt::format("bad complex literal '{}'", text)); };
  if (text.empty()) throw bad();
  if (text.back() != 'i') return {parse_real(text), 0.0L};
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto imag = [&](std::string_view s) -> Real {
    if (s.empty() || s == "+") return 1.0L;
    if (s == "-") return -1.0L;
    Real v = 0.0L;
    if (!try_float(s, v)) throw bad();
    return v;
  };
  if (split == std::string_view::npos) return {0.0L, imag(body)};
  Real re = 0.0L;
  if (!try_float(body.substr(0, split), re)) throw bad();
  return {re, imag(body.substr(split))};
}

std::string format_complex(Complex c) {
  const std::string im = format_real(c.imag());
  const bool signed_im = im.front() == '-' || im.front() == '+';
  return fmt::format("{}{}{}i", format_real(c.real()), signed_im ? "" : "+", im);
}

Rank1Family parse_family(std::string_view text) {
  Lines lines(text);
  const Line& head = lines.next();
  expect_keywords(head, {{0, "family"}, {1, "n_points"}, {3, "t_min"}, {5, "t_max"}}, 7);
  if (int_at(head, 2) != 2) Lines::fail(head, "only n_points 2 is supported");
  Rank1Family family;
  family.t_min = double_at(head, 4);
  family.t_max = double_at(head, 6);
  if (!(family.t_min <= family.t_max)) Lines::fail(head, "t_min must not exceed t_max");

  for (int point = 1; point <= 2; ++point) {
    const Line& ph = lines.next();
    expect_keywords(ph, {{0, "point"}}, 2);
    if (int_at(ph, 1) != point) Lines::fail(ph, fmt::format("expected point {}", point));
    FocusPointSpec& spec = family.points[static_cast<std::size_t>(point - 1)];
    bool have_chart = false;
    while (!have_chart) {
      const Line& l = lines.next();
      const std::string& kw = l.tokens.front();
      if (kw == "center") {
        if (l.tokens.size() != 5) Lines::fail(l, "center needs 4 numbers");
        for (int i = 0; i < 4; ++i) spec.center(i) = double_at(l, static_cast<std::size_t>(i + 1));
      } else if (kw == "radius") {
        if (l.tokens.size() != 2) Lines::fail(l, "radius needs 1 number");
        spec.radius = double_at(l, 1);
        if (!(spec.radius > 0.0)) Lines::fail(l, "radius must be positive");
      } else if (kw == "frame") {
        int degree = 0;
        if (l.tokens.size() == 3 && l.tokens[1] == "degree") {
          degree = int_at(l, 2);
          if (degree < 0) Lines::fail(l, "negative frame degree");
        } else if (l.tokens.size() != 1) {
          Lines::fail(l, "expected 'frame' or 'frame degree <m>'");
        }
        spec.frame.assign(static_cast<std::size_t>(degree + 1), Eigen::Matrix4d::Zero());
        for (auto& m : spec.frame) {
          for (int r = 0; r < 4; ++r) {
            const Line& row = lines.next();
            if (row.tokens.size() != 4) Lines::fail(row, "frame rows need 4 numbers");
            for (int c = 0; c < 4; ++c) m(r, c) = double_at(row, static_cast<std::size_t>(c));
          }
        }
      } else if (kw == "chart") {
        expect_keywords(l, {{1, "order"}}, 3);
        spec.chart = PolyJet(checked_order(l, int_at(l, 2)));
        for (;;) {
          const Line& cl = lines.next();
          if (cl.tokens.size() == 1 && cl.tokens[0] == "end") break;
          if (cl.tokens.size() < 5 || cl.tokens[2] != ":" || (cl.tokens.size() - 3) % 2 != 0) {
            Lines::fail(cl, "expected 'p q : re0 im0 [re1 im1 ...]'");
          }
          const int p = int_at(cl, 0);
          const int q = int_at(cl, 1);
          if (p < 0 || q < 0 || p + q > spec.chart.order()) Lines::fail(cl, "monomial beyond jet order");
          std::vector<Complex> poly;
          for (std::size_t i = 3; i < cl.tokens.size(); i += 2) {
            poly.emplace_back(real_at(cl, i), real_at(cl, i + 1));
          }
          spec.chart.at(p, q) = std::move(poly);
        }
        have_chart = true;
      } else {
        Lines::fail(l, fmt::format("unknown keyword '{}'", kw));
      }
    }
  }
  lines.expect_done();
  return family;
}

std::string format_family(const Rank1Family& family) {
  std::string out = fmt::format("family n_points 2 t_min {} t_max {}\n", format_double(family.t_min),
                                format_double(family.t_max));
  for (int point = 1; point <= 2; ++point) {
    const FocusPointSpec& spec = family.points[static_cast<std::size_t>(point - 1)];
    out += fmt::format("point {}\n", point);
    out += fmt::format("center {} {} {} {}\n", format_double(spec.center(0)), format_double(spec.center(1)),
                       format_double(spec.center(2)), format_double(spec.center(3)));
    out += fmt::format("radius {}\n", format_double(spec.radius));
    out += spec.frame.size() == 1 ? std::string("frame\n")
                                  : fmt::format("frame degree {}\n", spec.frame.size() - 1);
    for (const auto& m : spec.frame) {
      for (int r = 0; r < 4; ++r) {
        out += fmt::format("{} {} {} {}\n", format_double(m(r, 0)), format_double(m(r, 1)),
                           format_double(m(r, 2)), format_double(m(r, 3)));
      }
    }
    out += fmt::format("chart order {}\n", spec.chart.order());
    for (int d = 0; d <= spec.chart.order(); ++d) {
      for (int q = 0; q <= d; ++q) {
        const auto& poly = spec.chart(d - q, q);
        if (poly.empty()) continue;
        out += fmt::format("{} {} :", d - q, q);
        for (const Complex c : poly) out += fmt::format(" {} {}", format_real(c.real()), format_real(c.imag()));
        out += '\n';
      }
    }
    out += "end\n";
  }
  return out;
}

std::string format_profile(const Profile& profile, ProfileRoute route) {
  std::string out = fmt::format("# mu-profile, route {}\n",
                                route == ProfileRoute::Slice4 ? "slice4" : "suspended5");
  out += "# critical value at sample t: (0, 0, t)\n";
  out += "# trace = tr(J2 J1^-1) of the base complex structures at the two focus points\n";
  out += "# mu = sqrt((trace - 2) / (trace + 2))\n";
  out += "# t\ttrace\tmu\tstatus\n";
  for (const auto& row : profile.rows) {
    out += fmt::format("{}\t{}\t{}\t{}\n", format_double(row.t), format_double(row.trace),
                       format_double(row.mu), row.status);
  }
  return out;
}

Profile parse_profile(std::string_view text) {
  Lines lines(text);
  Profile profile;
  while (!lines.done()) {
    const Line& l = lines.next();
    if (l.tokens.size() != 4) Lines::fail(l, "expected 't trace mu status'");
    profile.rows.push_back({double_at(l, 0), double_at(l, 1), double_at(l, 2), l.tokens[3]});
  }
  return profile;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read '{}'", path));
  return ss.str();
}

}  // namespace ffsing
