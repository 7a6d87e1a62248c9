#include "hypothesis_parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "censwald/error.hpp"

namespace censwald::cli {

namespace {

enum class Tok { Ident, Number, Equals, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (c == '=') {
      t.kind = Tok::Equals;
      ++i;
    } else if (c == ',') {
      t.kind = Tok::Comma;
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '-')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      std::transform(t.text.begin(), t.text.end(), t.text.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
      const char* first = s.data() + i;
      const char* last = s.data() + s.size();
      if (*first == '+') ++first;
      double v = 0.0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || !std::isfinite(v)) throw ParseError("malformed number", i);
      t.kind = Tok::Number;
      t.value = v;
      i = static_cast<std::size_t>(res.ptr - s.data());
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

// Index of a parameter name (or alias) in the family; nullopt when unknown.
std::optional<std::size_t> parameter_index(const Family& fam, const std::string& name) {
  const auto names = fam.parameter_names();
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k;
  if (fam.id() == FamilyId::Weibull) {
    if (name == "sigma" || name == "a") return 0;
    if (name == "b") return 1;
  } else if (name == "theta") {
    return 0;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const Family& fam) : toks_(tokenize(text)), fam_(fam) {}

  ParsedHypothesis parse() {
    if (peek().kind == Tok::End) throw ParseError("empty hypothesis", 0);
    while (peek().kind != Tok::End) {
      clause();
      if (peek().kind == Tok::Comma) {
        const Token& c = next();
        if (peek().kind == Tok::End) throw ParseError("trailing comma", c.pos);
      }
    }
    return build();
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) throw ParseError(std::string("expected ") + what, peek().pos);
    return next();
  }

  void clause() {
    const Token name = expect(Tok::Ident, "a parameter name");
    expect(Tok::Equals, "'='");
    if (name.text == "dir") {
      const Token d = expect(Tok::Ident, "a direction");
      if (direction_) throw ParseError("direction given twice", name.pos);
      if (d.text == "greater") {
        direction_ = Direction::Greater;
      } else if (d.text == "less") {
        direction_ = Direction::Less;
      } else if (d.text == "two-sided" || d.text == "two_sided") {
        direction_ = Direction::TwoSided;
      } else {
        throw ParseError("unknown direction '" + d.text + "'", d.pos);
      }
      dir_pos_ = name.pos;
      return;
    }
    if (peek().kind == Tok::Number) {
      one_sample(name);
    } else if (peek().kind == Tok::Ident) {
      two_sample(name, next());
    } else {
      throw ParseError("expected a value or a parameter name", peek().pos);
    }
  }

  void one_sample(const Token& name) {
    mark(false, name.pos);
    const std::size_t p = fam_.dimension();
    if (name.text == "theta" && p > 1) {
      std::vector<double> values{next().value};
      while (peek().kind == Tok::Comma && toks_[i_ + 1].kind == Tok::Number) {
        ++i_;
        values.push_back(next().value);
      }
      if (values.size() != p)
        throw ParseError("theta needs " + std::to_string(p) + " values", name.pos);
      for (std::size_t k = 0; k < p; ++k) set_value(k, values[k], name.pos);
      return;
    }
    const auto idx = parameter_index(fam_, name.text);
    if (!idx) throw ParseError("unknown parameter '" + name.text + "'", name.pos);
    set_value(*idx, next().value, name.pos);
  }

  void two_sample(const Token& lhs, const Token& rhs) {
    mark(true, lhs.pos);
    auto split = [&](const Token& t, char arm) {
      if (t.text.size() < 2 || t.text.back() != arm)
        throw ParseError(std::string("expected a name ending in '") + arm + "'", t.pos);
      return t.text.substr(0, t.text.size() - 1);
    };
    const std::string a = split(lhs, '1');
    const std::string b = split(rhs, '2');
    if (a != b) throw ParseError("both sides must name the same parameter", rhs.pos);
    if (a == "theta" && fam_.dimension() > 1) {
      for (std::size_t k = 0; k < fam_.dimension(); ++k) add_component(k, lhs.pos);
      return;
    }
    const auto idx = parameter_index(fam_, a);
    if (!idx) throw ParseError("unknown parameter '" + a + "'", lhs.pos);
    add_component(*idx, lhs.pos);
  }

  void mark(bool two, std::size_t pos) {
    if (two_sample_ && *two_sample_ != two) throw ParseError("cannot mix one- and two-sample clauses", pos);
    two_sample_ = two;
  }

  void set_value(std::size_t k, double v, std::size_t pos) {
    add_component(k, pos);
    values_.push_back(v);
  }

  void add_component(std::size_t k, std::size_t pos) {
    if (!seen_.insert(k).second) throw ParseError("parameter restricted twice", pos);
    components_.push_back(k);
  }

  ParsedHypothesis build() {
    if (!two_sample_) throw ParseError("no restriction given", dir_pos_);
    const std::size_t p = fam_.dimension();
    const auto names = fam_.parameter_names();
    if (!*two_sample_) {
      if (direction_ && *direction_ != Direction::TwoSided)
        throw ParseError("one-sided alternatives are only supported for two-sample tests", dir_pos_);
      std::string desc;
      for (std::size_t i = 0; i < components_.size(); ++i)
        desc += (i ? "," : "") + names[components_[i]] + "=" + format(values_[i]);
      if (components_.size() == p) {
        Vec theta0(static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < p; ++i) theta0[static_cast<Eigen::Index>(components_[i])] = values_[i];
        return Restriction::simple(theta0, desc);
      }
      Mat a = Mat::Zero(static_cast<Eigen::Index>(components_.size()), static_cast<Eigen::Index>(p));
      Vec c(static_cast<Eigen::Index>(components_.size()));
      for (std::size_t i = 0; i < components_.size(); ++i) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(components_[i])) = 1.0;
        c[static_cast<Eigen::Index>(i)] = values_[i];
      }
      return Restriction::linear(a, c, desc);
    }
    const Direction dir = direction_.value_or(Direction::TwoSided);
    if (dir != Direction::TwoSided && components_.size() != 1)
      throw ParseError("a one-sided alternative needs exactly one restriction", dir_pos_);
    std::string desc;
    for (std::size_t i = 0; i < components_.size(); ++i)
      desc += (i ? "," : "") + names[components_[i]] + "1=" + names[components_[i]] + "2";
    if (dir != Direction::TwoSided) desc += std::string(" dir=") + to_string(dir);
    if (components_.size() == 1) return TwoSampleRestriction::component_homogeneity(p, components_[0], dir, desc);
    if (components_.size() == p) {
      std::vector<std::size_t> sorted = components_;
      std::sort(sorted.begin(), sorted.end());
      if (sorted == components_) return TwoSampleRestriction::homogeneity(p, desc);
    }
    // General subset of components: m = S (theta1 - theta2).
    Mat s = Mat::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(components_.size()));
    for (std::size_t i = 0; i < components_.size(); ++i)
      s(static_cast<Eigen::Index>(components_[i]), static_cast<Eigen::Index>(i)) = 1.0;
    TwoSampleRestriction res;
    res.r = components_.size();
    res.p = p;
    res.m = [s](const Vec& a, const Vec& b) -> Vec { return s.transpose() * (a - b); };
    res.jacobian1 = [s](const Vec&, const Vec&) -> Mat { return s; };
    res.jacobian2 = [s](const Vec&, const Vec&) -> Mat { return -s; };
    res.description = desc;
    return res;
  }

  static std::string format(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const Family& fam_;
  std::optional<bool> two_sample_;
  std::optional<Direction> direction_;
  std::size_t dir_pos_ = 0;
  std::vector<std::size_t> components_;
  std::vector<double> values_;
  std::set<std::size_t> seen_;
};

}  // namespace

ParsedHypothesis hypothesis_parse(std::string_view text, const Family& fam) { return Parser(text, fam).parse(); }

}  // namespace censwald::cli
