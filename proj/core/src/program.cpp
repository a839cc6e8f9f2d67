#include <cctype>
#include <charconv>

#include <nlohmann/json.hpp>

#include "hearth/planner.hpp"

namespace hearth {

namespace {

struct Arg {
  bool is_string = false;
  long long number = 0;
  std::string text;
  int line = 0, column = 0;
};

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view t) : t_(t) {}

  CodeProgram run() {
    CodeProgram prog;
    bool has_context = false;
    while (true) {
      skip_separators();
      if (at_end()) break;
      const int line = line_, col = col_;
      std::string name = ident();
      if (name.empty()) fail("expected a primitive name");
      skip_blank();
      if (peek() != '(') fail("expected '(' after '" + name + "'");
      advance();
      std::vector<Arg> args = arguments();
      auto arity = [&](std::size_t n) {
        if (args.size() != n)
          throw ParseError(name + "() takes " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()),
                           line, col);
      };
      auto id_arg = [&]() -> ObjectId {
        arity(1);
        if (args[0].is_string) throw ParseError(name + "() expects an object id", args[0].line, args[0].column);
        return static_cast<ObjectId>(args[0].number);
      };
      if (name == "goto") {
        prog.primitives.push_back(Goto{id_arg()});
        has_context = true;
      } else if (name == "goto_user") {
        arity(0);
        prog.primitives.push_back(GotoUser{});
      } else if (name == "target") {
        prog.primitives.push_back(Target{id_arg()});
        has_context = true;
      } else if (name == "find") {
        prog.primitives.push_back(Find{id_arg()});
        has_context = true;
      } else if (name == "interact") {
        arity(0);
        if (!has_context) throw ParseError("interact() needs an earlier goto, find or target", line, col);
        prog.primitives.push_back(InteractCall{});
      } else if (name == "speak") {
        arity(1);
        if (!args[0].is_string) throw ParseError("speak() expects a string", args[0].line, args[0].column);
        prog.primitives.push_back(Say{args[0].text});
      } else {
        throw ParseError("unknown primitive '" + name + "'", line, col);
      }
    }
    if (prog.primitives.empty()) throw ParseError("program is empty", line_, col_);
    return prog;
  }

 private:
  bool at_end() const { return pos_ >= t_.size(); }
  char peek() const { return at_end() ? '\0' : t_[pos_]; }
  void advance() {
    if (t_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, line_, col_); }

  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }
  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') advance();
      else if (c == '#') skip_comment();
      else break;
    }
  }
  void skip_separators() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';') advance();
      else if (c == '#') skip_comment();
      else break;
    }
  }

  std::string ident() {
    std::string out;
    while (!at_end() && ((peek() >= 'a' && peek() <= 'z') || peek() == '_')) {
      out += peek();
      advance();
    }
    return out;
  }

  void skip_arg_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) advance();
  }

  std::vector<Arg> arguments() {
    std::vector<Arg> args;
    skip_arg_space();
    if (peek() == ')') {
      advance();
      return args;
    }
    while (true) {
      skip_arg_space();
      Arg a;
      a.line = line_;
      a.column = col_;
      if (peek() == '"') {
        a.is_string = true;
        a.text = string_lit();
      } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
        auto tok = t_.substr(start, pos_ - start);
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), a.number);
        if (res.ec != std::errc() || a.number > 2147483647LL) throw ParseError("integer out of range", a.line, a.column);
        if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '_')
          fail("expected an integer id");
      } else if (at_end()) {
        fail("unexpected end of program inside an argument list");
      } else {
        fail(std::string("unexpected character '") + peek() + "' in argument list");
      }
      args.push_back(std::move(a));
      skip_arg_space();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ')') {
        advance();
        return args;
      }
      if (at_end()) fail("missing ')'");
      fail("expected ',' or ')'");
    }
  }

  std::string string_lit() {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = peek();
      advance();
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) fail("unterminated escape");
        char e = peek();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
        advance();
      } else {
        out += c;
      }
    }
  }

  std::string_view t_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

constexpr std::string_view kGrammar = R"grammar(program  := line*
line     := call ((";" | whitespace) call)* comment?
call     := name "(" args? ")"
name     := goto | goto_user | target | interact | find | speak
args     := arg ("," arg)*
arg      := int | string
string   := '"' (escape | char)* '"'     escapes: \" \\ \n \t
comment  := "#" any text to end of line

goto(id)        walk to a spot from which object id is within reach
goto_user()     walk up to the user
target(id)      aim the gaze at object id and mark it as the interaction target
interact()      grab, put, open or close the current target
find(id)        walk toward object id until it comes into view
speak("text")   say something to the user)grammar";

}  // namespace

std::string to_code(const Primitive& p) {
  struct V {
    std::string operator()(const Goto& g) const { return "goto(" + std::to_string(g.id) + ")"; }
    std::string operator()(const GotoUser&) const { return "goto_user()"; }
    std::string operator()(const Target& t) const { return "target(" + std::to_string(t.id) + ")"; }
    std::string operator()(const InteractCall&) const { return "interact()"; }
    std::string operator()(const Find& f) const { return "find(" + std::to_string(f.id) + ")"; }
    std::string operator()(const Say& s) const { return "speak(" + quote_string(s.text) + ")"; }
  };
  return std::visit(V{}, p);
}

std::string to_code(const CodeProgram& program) {
  std::string out;
  for (std::size_t i = 0; i < program.primitives.size(); ++i) {
    if (i) out += '\n';
    out += to_code(program.primitives[i]);
  }
  return out;
}

CodeProgram parse_program(std::string_view text) {
  auto p = ProgramParser(text).run();
  p.source = ProgramSource::parsed;
  return p;
}

std::string_view program_grammar() { return kGrammar; }

std::string answer_sentence(std::string_view receptacle_name) {
  return "It's on the " + std::string(receptacle_name) + ".";
}

CodeProgram compile_task(const TaskInstance& task) {
  auto need = [&](const std::optional<ObjectId>& id, const char* what) {
    if (!id) throw Error(std::string(to_string(task.tmpl)) + " task is missing object " + what);
    return *id;
  };
  CodeProgram p;
  p.source = ProgramSource::template_;
  auto& out = p.primitives;
  switch (task.tmpl) {
    case TaskTemplate::come_here: out = {GotoUser{}}; break;
    case TaskTemplate::go_to: out = {Goto{need(task.object_a, "A")}}; break;
    case TaskTemplate::pick_up: {
      const ObjectId a = need(task.object_a, "A");
      out = {Goto{a}, Target{a}, InteractCall{}};
      break;
    }
    case TaskTemplate::bring_me: {
      const ObjectId a = need(task.object_a, "A");
      out = {Goto{a}, Target{a}, InteractCall{}, GotoUser{}};
      break;
    }
    case TaskTemplate::where_is: {
      const ObjectId a = need(task.object_a, "A");
      if (!task.answer) throw Error("where_is task has no ground-truth answer");
      out = {Find{a}, Say{answer_sentence(*task.answer)}};
      break;
    }
    case TaskTemplate::put_on: {
      const ObjectId a = need(task.object_a, "A"), b = need(task.object_b, "B");
      out = {Goto{a}, Target{a}, InteractCall{}, Goto{b}, Target{b}, InteractCall{}};
      break;
    }
  }
  return p;
}

CodeProgram write_code_external(const std::string& scene_description, const std::string& instruction,
                                ModelClient& client) {
  std::string current = instruction;
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    nlohmann::json req{{"description", scene_description}, {"instruction", current}, {"grammar", kGrammar}};
    const std::string reply = client.complete(req.dump());
    std::string code;
    try {
      auto j = nlohmann::json::parse(reply);
      if (!j.is_object() || !j.contains("code") || !j["code"].is_string())
        throw ClientError("code reply must be an object with a string field 'code'");
      code = j["code"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ClientError(std::string("code reply is not valid JSON: ") + e.what());
    }
    try {
      auto p = parse_program(code);
      p.source = ProgramSource::llm;
      return p;
    } catch (const ParseError& e) {
      last_error = e.what();
      current = instruction + "\n\nThe previous program failed to parse: " + last_error + "\nReply with a corrected program.";
    }
  }
  throw UnparseableAfterRetry("model reply still unparseable after one retry: " + last_error);
}

}  // namespace hearth
