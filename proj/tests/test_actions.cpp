#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <hearth/actions.hpp>
#include <hearth/llm.hpp>
#include <hearth/planner.hpp>

using namespace hearth;

namespace {

std::string code_reply(const std::string& code) { return nlohmann::json{{"code", code}}.dump(); }

}  // namespace

TEST(Actions, CanonicalCodes) {
  EXPECT_EQ(to_code(Action{MoveForward{1.2}}), "move_forward(1.2)");
  EXPECT_EQ(to_code(Action{RotateRight{-59}}), "rotate_right(-59)");
  EXPECT_EQ(to_code(Action{RotateUp{-27.5}}), "rotate_up(-27.5)");
  EXPECT_EQ(to_code(Action{Interact{InteractKind::grab}}), "interact(grab)");
  EXPECT_EQ(to_code(Action{Speak{"It's on the sofa."}}), "speak(\"It's on the sofa.\")");
  const std::vector<Action> g{MoveForward{1.2}, RotateRight{-35}};
  EXPECT_EQ(to_code(g), "move_forward(1.2), rotate_right(-35)");
  EXPECT_EQ(quote_string("a\"b\\c\n"), "\"a\\\"b\\\\c\\n\"");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_number(-0.0), "0");
}

TEST(Actions, RoundTrip) {
  const std::vector<Action> all{Speak{"hi \"there\"\n"}, MoveForward{0.549}, RotateRight{-180},
                                RotateUp{12.25},         Interact{InteractKind::put}, Interact{InteractKind::close},
                                MoveForward{1e-7},       RotateRight{1.0 / 3.0}};
  for (const auto& a : all) {
    const auto g = parse_action_group(to_code(a));
    ASSERT_EQ(g.actions.size(), 1u);
    EXPECT_EQ(g.actions[0], a) << to_code(a);
    EXPECT_FALSE(g.done);
  }
  const auto g = parse_action_group(to_code(all));
  EXPECT_EQ(g.actions, all);
}

TEST(Actions, DoneSentinel) {
  auto g = parse_action_group("move_forward(1), done()");
  EXPECT_TRUE(g.done);
  ASSERT_EQ(g.actions.size(), 1u);
  g = parse_action_group("  done( ) ");
  EXPECT_TRUE(g.done);
  EXPECT_TRUE(g.actions.empty());
  EXPECT_THROW(parse_action_group("done(), move_forward(1)"), ParseError);
}

TEST(Actions, Malformed) {
  for (const char* bad : {"", "   ", "move_forward(", "move_forward(-1)", "fly(2)", "rotate_right(\"x\")",
                          "interact(eat)", "speak(hello)", "move_forward(1) rotate_right(2)", "speak(\"open",
                          "move_forward(1),", "rotate_right(1e999)", "move_forward(nan)"}) {
    EXPECT_THROW(parse_action_group(bad), ParseError) << bad;
  }
  try {
    parse_action_group("move_forward(1), jump(2)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 18);
  }
}

TEST(Program, FindThenSpeak) {
  const CodeProgram p = parse_program("find(36)\nspeak(\"It's on the sofa.\")");
  ASSERT_EQ(p.primitives.size(), 2u);
  EXPECT_EQ(p.primitives[0], Primitive{Find{36}});
  EXPECT_EQ(p.primitives[1], Primitive{Say{"It's on the sofa."}});
}

TEST(Program, ReferencePrograms) {
  EXPECT_EQ(parse_program("goto(5) target(5) interact()").primitives.size(), 3u);
  EXPECT_EQ(parse_program("goto_user()").primitives, std::vector<Primitive>{GotoUser{}});
  const auto p = parse_program("goto(4); target(4); interact()\n# then deliver\ngoto(9) target(9) interact()");
  ASSERT_EQ(p.primitives.size(), 6u);
  EXPECT_EQ(p.primitives[3], Primitive{Goto{9}});
  EXPECT_EQ(parse_program(to_code(p)).primitives, p.primitives);
}

TEST(Program, ErrorsCarryPosition) {
  try {
    parse_program("goto(1)\n  jump(3)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
    EXPECT_NE(std::string(e.what()).find("jump"), std::string::npos);
  }
  EXPECT_THROW(parse_program("interact()"), ParseError);
  EXPECT_THROW(parse_program("speak(\"hi\")\ninteract()"), ParseError);
  EXPECT_THROW(parse_program(""), ParseError);
  EXPECT_THROW(parse_program("# only a comment"), ParseError);
  EXPECT_THROW(parse_program("goto(\"sofa\")"), ParseError);
  EXPECT_THROW(parse_program("goto(1, 2)"), ParseError);
  EXPECT_THROW(parse_program("goto(99999999999)"), ParseError);
  EXPECT_THROW(parse_program("speak(3)"), ParseError);
  EXPECT_FALSE(program_grammar().empty());
}

TEST(CompileTask, Templates) {
  TaskInstance t;
  t.tmpl = TaskTemplate::where_is;
  t.object_a = 36;
  t.answer = "sofa";
  EXPECT_EQ(compile_task(t).primitives, (std::vector<Primitive>{Find{36}, Say{"It's on the sofa."}}));
  EXPECT_EQ(compile_task(t).source, ProgramSource::template_);

  TaskInstance c;
  EXPECT_EQ(compile_task(c).primitives, std::vector<Primitive>{GotoUser{}});

  TaskInstance put;
  put.tmpl = TaskTemplate::put_on;
  put.object_a = 4;
  put.object_b = 9;
  const auto pp = compile_task(put).primitives;
  ASSERT_EQ(pp.size(), 6u);
  EXPECT_EQ(pp.front(), Primitive{Goto{4}});
  EXPECT_EQ(pp[3], Primitive{Goto{9}});
  EXPECT_EQ(pp.back(), Primitive{InteractCall{}});

  TaskInstance bring;
  bring.tmpl = TaskTemplate::bring_me;
  bring.object_a = 3;
  EXPECT_EQ(compile_task(bring).primitives.back(), Primitive{GotoUser{}});

  TaskInstance broken;
  broken.tmpl = TaskTemplate::pick_up;
  EXPECT_THROW(compile_task(broken), Error);
}

TEST(WriteCode, ScriptedReplyIsParsed) {
  ScriptedModelClient client({code_reply("find(36)\nspeak(\"It's on the sofa.\")")});
  const CodeProgram p = write_code_external("scene", "Where is the orange?", client);
  EXPECT_EQ(p.primitives, (std::vector<Primitive>{Find{36}, Say{"It's on the sofa."}}));
  EXPECT_EQ(p.source, ProgramSource::llm);
  ASSERT_EQ(client.requests().size(), 1u);
  const auto req = nlohmann::json::parse(client.requests()[0]);
  EXPECT_EQ(req["instruction"], "Where is the orange?");
  EXPECT_TRUE(req.contains("grammar"));
}

TEST(WriteCode, OneRetryWithError) {
  ScriptedModelClient client({code_reply("walk(3)"), code_reply("goto_user()")});
  const CodeProgram p = write_code_external("scene", "come here", client);
  EXPECT_EQ(p.primitives, std::vector<Primitive>{GotoUser{}});
  ASSERT_EQ(client.requests().size(), 2u);
  const auto retry = nlohmann::json::parse(client.requests()[1]);
  EXPECT_NE(retry["instruction"].get<std::string>().find("walk"), std::string::npos);
}

TEST(WriteCode, UnparseableAfterRetry) {
  ScriptedModelClient client({code_reply("walk(3)"), code_reply("run(4)")});
  EXPECT_THROW(write_code_external("scene", "come here", client), UnparseableAfterRetry);
  ScriptedModelClient garbage({"not json"});
  EXPECT_THROW(write_code_external("scene", "come here", garbage), ClientError);
  ScriptedModelClient empty({});
  EXPECT_THROW(write_code_external("scene", "come here", empty), ClientError);
}

TEST(Llm, ClientFromEnv) {
  unsetenv("HEARTH_TEST_ENDPOINT");
  EXPECT_EQ(client_from_env("HEARTH_TEST_ENDPOINT"), nullptr);
  setenv("HEARTH_TEST_ENDPOINT", "http://127.0.0.1:9/complete", 1);
  EXPECT_NE(client_from_env("HEARTH_TEST_ENDPOINT"), nullptr);
  setenv("HEARTH_TEST_ENDPOINT", "ftp://nowhere", 1);
  EXPECT_THROW(client_from_env("HEARTH_TEST_ENDPOINT"), Error);
  unsetenv("HEARTH_TEST_ENDPOINT");
}
