#include "wolffkit/measure_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wolffkit {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += fmt(p[i]);
  }
  return s;
}

class Line {
 public:
  Line(int number, std::vector<std::string> tokens) : number_(number), tokens_(std::move(tokens)) {}

  bool done() const { return pos_ == tokens_.size(); }
  int number() const { return number_; }

  std::string word() {
    if (done()) throw ParseError(number_, "unexpected end of line");
    return tokens_[pos_++];
  }
  void expect(const std::string& kw) {
    std::string w = word();
    if (w != kw) throw ParseError(number_, "expected '" + kw + "', found '" + w + "'");
  }
  double number() {
    std::string w = word();
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0' || std::isnan(v)) throw ParseError(number_, "bad number '" + w + "'");
    return v;
  }
  Point point(int dim) {
    Point p(dim);
    for (double& c : p) c = number();
    return p;
  }
  void finish() {
    if (!done()) throw ParseError(number_, "trailing token '" + tokens_[pos_] + "'");
  }

 private:
  int number_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

// Reads the next nonblank line, comments stripped; false at end of input.
bool next_line(std::istream& in, int& lineno, std::vector<std::string>& tokens) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ss(raw);
    tokens.clear();
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (!tokens.empty()) return true;
  }
  return false;
}

struct Op {
  bool is_scale = true;
  double factor = 1.0;
  Ball ball;
};

struct Component {
  const MeasureNode* leaf = nullptr;
  std::vector<Op> ops;
};

void collect(const Measure& m, const std::vector<Op>& outer, std::vector<Component>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SumNode>) {
          for (const Measure& part : node.parts) collect(part, outer, out);
        } else if constexpr (std::is_same_v<T, ScaledNode>) {
          std::vector<Op> ops{Op{true, node.factor, {}}};
          ops.insert(ops.end(), outer.begin(), outer.end());
          collect(node.base, ops, out);
        } else if constexpr (std::is_same_v<T, RestrictedNode>) {
          std::vector<Op> ops{Op{false, 1.0, node.ball}};
          ops.insert(ops.end(), outer.begin(), outer.end());
          collect(node.base, ops, out);
        } else {
          out.push_back(Component{&m.node(), outer});
        }
      },
      m.node());
}

}  // namespace

Measure parse_measure(std::istream& in) {
  int lineno = 0;
  std::vector<std::string> tokens;
  if (!next_line(in, lineno, tokens)) throw ParseError(lineno, "empty measure file");
  Line head(lineno, tokens);
  head.expect("dim");
  double dval = head.number();
  head.finish();
  if (dval < 1 || dval > 64 || dval != std::floor(dval)) throw ParseError(lineno, "dim must be an integer in [1, 64]");
  const int dim = static_cast<int>(dval);

  std::vector<Measure> parts;
  while (next_line(in, lineno, tokens)) {
    Line start(lineno, tokens);
    start.expect("component");
    const std::string kind = start.word();
    start.finish();
    if (kind != "dirac_sum" && kind != "radial_density" && kind != "ball_cloud")
      throw ParseError(lineno, "unknown component kind '" + kind + "'");
    const int start_line = lineno;

    std::vector<Atom> atoms;
    std::vector<RadialPiece> pieces;
    std::vector<UniformBall> balls;
    std::vector<std::pair<int, Op>> ops;
    bool closed = false;
    while (next_line(in, lineno, tokens)) {
      Line ln(lineno, tokens);
      const std::string w = ln.word();
      if (w == "end") {
        ln.finish();
        closed = true;
        break;
      }
      if (w == "scale") {
        ops.push_back({lineno, Op{true, ln.number(), {}}});
      } else if (w == "restrict") {
        ln.expect("center");
        Point c = ln.point(dim);
        ln.expect("radius");
        double r = ln.number();
        if (!(r > 0.0) || !std::isfinite(r)) throw ParseError(lineno, "restrict radius must be positive");
        ops.push_back({lineno, Op{false, 1.0, Ball(std::move(c), r)}});
      } else if (!ops.empty()) {
        throw ParseError(lineno, "'" + w + "' after scale/restrict");
      } else if (w == "atom" && kind == "dirac_sum") {
        Point p = ln.point(dim);
        ln.expect("weight");
        atoms.push_back(Atom{std::move(p), ln.number()});
      } else if (w == "piece" && kind == "radial_density") {
        RadialPiece piece;
        ln.expect("coeff");
        piece.coeff = ln.number();
        ln.expect("gamma");
        piece.gamma = ln.number();
        ln.expect("from");
        piece.r_lo = ln.number();
        ln.expect("to");
        piece.r_hi = ln.number();
        pieces.push_back(piece);
      } else if (w == "ball" && kind == "ball_cloud") {
        UniformBall b;
        ln.expect("center");
        b.center = ln.point(dim);
        ln.expect("radius");
        b.radius = ln.number();
        ln.expect("weight");
        b.weight = ln.number();
        balls.push_back(std::move(b));
      } else {
        throw ParseError(lineno, "unexpected '" + w + "' in " + kind + " component");
      }
      ln.finish();
    }
    if (!closed) throw ParseError(start_line, "component without 'end'");

    Measure m = Measure::zero(dim);
    try {
      if (kind == "dirac_sum") m = Measure::dirac_sum(dim, std::move(atoms));
      if (kind == "radial_density") m = Measure::radial_density(dim, std::move(pieces));
      if (kind == "ball_cloud") m = Measure::ball_cloud(dim, std::move(balls));
    } catch (const std::invalid_argument& e) {
      throw ParseError(start_line, e.what());
    }
    for (auto& [line, op] : ops) {
      try {
        m = op.is_scale ? m.scaled(op.factor) : m.restricted(op.ball);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
      }
    }
    parts.push_back(std::move(m));
  }
  if (parts.empty()) return Measure::zero(dim);
  if (parts.size() == 1) return parts.front();
  return Measure::sum(dim, std::move(parts));
}

Measure parse_measure_string(const std::string& text) {
  std::istringstream in(text);
  return parse_measure(in);
}

Measure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file '" + path + "'");
  return parse_measure(in);
}

void write_measure_file(const std::string& path, const Measure& mu) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write measure file '" + path + "'");
  write_measure(out, mu);
  if (!out) throw std::runtime_error("failed writing measure file '" + path + "'");
}

void write_measure(std::ostream& out, const Measure& mu) {
  out << "dim " << mu.dim() << '\n';
  std::vector<Component> comps;
  collect(mu, {}, comps);
  for (const Component& c : comps) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, DiracSumNode>) {
            out << "component dirac_sum\n";
            for (const Atom& a : node.atoms) out << "  atom " << fmt_point(a.point) << " weight " << fmt(a.weight) << '\n';
          } else if constexpr (std::is_same_v<T, RadialDensityNode>) {
            out << "component radial_density\n";
            for (const RadialPiece& p : node.pieces)
              out << "  piece coeff " << fmt(p.coeff) << " gamma " << fmt(p.gamma) << " from " << fmt(p.r_lo) << " to "
                  << fmt(p.r_hi) << '\n';
          } else if constexpr (std::is_same_v<T, BallCloudNode>) {
            out << "component ball_cloud\n";
            for (const UniformBall& b : node.balls)
              out << "  ball center " << fmt_point(b.center) << " radius " << fmt(b.radius) << " weight "
                  << fmt(b.weight) << '\n';
          }
        },
        *c.leaf);
    for (const Op& op : c.ops) {
      if (op.is_scale) {
        out << "  scale " << fmt(op.factor) << '\n';
      } else {
        out << "  restrict center " << fmt_point(op.ball.center) << " radius " << fmt(op.ball.radius) << '\n';
      }
    }
    out << "end\n";
  }
}

std::string measure_to_string(const Measure& mu) {
  std::ostringstream out;
  write_measure(out, mu);
  return out.str();
}

std::vector<Point> parse_points(std::istream& in, int dim) {
  std::vector<Point> pts;
  int lineno = 0;
  std::vector<std::string> tokens;
  while (next_line(in, lineno, tokens)) {
    if (static_cast<int>(tokens.size()) != dim)
      throw ParseError(lineno, "expected " + std::to_string(dim) + " coordinates, found " +
                                   std::to_string(tokens.size()));
    Line ln(lineno, tokens);
    pts.push_back(ln.point(dim));
  }
  return pts;
}

std::vector<Point> read_points_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file '" + path + "'");
  return parse_points(in, dim);
}

}  // namespace wolffkit
