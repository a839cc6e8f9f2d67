#include "hearth/actions.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "hearth/error.hpp"

namespace hearth {

std::string_view to_string(InteractKind k) {
  switch (k) {
    case InteractKind::grab: return "grab";
    case InteractKind::put: return "put";
    case InteractKind::open: return "open";
    case InteractKind::close: return "close";
  }
  return "grab";
}

bool is_motion(const Action& a) {
  return std::holds_alternative<MoveForward>(a) || std::holds_alternative<RotateRight>(a) ||
         std::holds_alternative<RotateUp>(a);
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string to_code(const Action& a) {
  struct V {
    std::string operator()(const Speak& s) const { return "speak(" + quote_string(s.text) + ")"; }
    std::string operator()(const MoveForward& m) const { return "move_forward(" + format_number(m.distance) + ")"; }
    std::string operator()(const RotateRight& r) const { return "rotate_right(" + format_number(r.degrees) + ")"; }
    std::string operator()(const RotateUp& r) const { return "rotate_up(" + format_number(r.degrees) + ")"; }
    std::string operator()(const Interact& i) const { return "interact(" + std::string(to_string(i.kind)) + ")"; }
  };
  return std::visit(V{}, a);
}

std::string to_code(std::span<const Action> group) {
  std::string out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i) out += ", ";
    out += to_code(group[i]);
  }
  return out;
}

namespace {

class GroupParser {
 public:
  explicit GroupParser(std::string_view t) : t_(t) {}

  ActionGroup run() {
    ActionGroup g;
    skip_ws();
    if (at_end()) fail("empty action group");
    while (true) {
      if (g.done) fail("done() must be the last call");
      std::size_t name_at = pos_;
      std::string name = ident();
      if (name.empty()) fail("expected an action name");
      skip_ws();
      expect('(');
      skip_ws();
      if (name == "speak") {
        g.actions.push_back(Speak{string_lit()});
      } else if (name == "move_forward") {
        double d = number();
        if (d < 0) fail("move_forward distance must be >= 0", name_at);
        g.actions.push_back(MoveForward{d});
      } else if (name == "rotate_right") {
        g.actions.push_back(RotateRight{number()});
      } else if (name == "rotate_up") {
        g.actions.push_back(RotateUp{number()});
      } else if (name == "interact") {
        std::size_t at = pos_;
        std::string k = ident();
        if (k == "grab") g.actions.push_back(Interact{InteractKind::grab});
        else if (k == "put") g.actions.push_back(Interact{InteractKind::put});
        else if (k == "open") g.actions.push_back(Interact{InteractKind::open});
        else if (k == "close") g.actions.push_back(Interact{InteractKind::close});
        else fail("interact kind must be grab, put, open or close", at);
      } else if (name == "done") {
        g.done = true;
      } else {
        fail("unknown action '" + name + "'", name_at);
      }
      skip_ws();
      expect(')');
      skip_ws();
      if (at_end()) break;
      expect(',');
      skip_ws();
    }
    return g;
  }

 private:
  bool at_end() const { return pos_ >= t_.size(); }
  char peek() const { return at_end() ? '\0' : t_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, 1, static_cast<int>(at) + 1);
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    std::size_t start = pos_;
    while (!at_end() && ((peek() >= 'a' && peek() <= 'z') || peek() == '_')) ++pos_;
    return std::string(t_.substr(start, pos_ - start));
  }

  double number() {
    std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' || peek() == '+' ||
                         peek() == '.' || peek() == 'e' || peek() == 'E'))
      ++pos_;
    std::string_view tok = t_.substr(start, pos_ - start);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail("expected a number", start);
    return v;
  }

  std::string string_lit() {
    if (peek() != '"') fail("expected a string literal");
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = t_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        char e = t_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unknown escape '\\") + e + "'", pos_ - 2);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

ActionGroup parse_action_group(std::string_view text) { return GroupParser(text).run(); }

}  // namespace hearth
