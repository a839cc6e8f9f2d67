#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <hearth/taskgen.hpp>

#include "support.hpp"

using namespace hearth;
using namespace hearth::test;

namespace {

const AssetCatalog& cat() { return *AssetCatalog::builtin(); }

SceneSpec house() {
  SceneSpec s = open_room(7, 7);
  const auto sofa = floor_object(4, "sofa", 3.5, 0.5);
  const auto table = floor_object(9, "coffee_table", 3.5, 3.0);
  const auto shelf = floor_object(12, "bookshelf", 0.5, 5.0, 90);
  s.objects = {sofa, table, shelf};
  s.objects.push_back(on_top(36, "orange", sofa, 3.0, 0.5));
  s.objects.push_back(on_top(5, "cup", table, 3.3, 3.0));
  s.objects.push_back(on_top(6, "apple", table, 3.7, 3.0));
  s.objects.push_back(on_top(7, "apple", sofa, 4.2, 0.5));
  return s;
}

}  // namespace

TEST(TaskGen, TemplateNames) {
  for (TaskTemplate t : kAllTemplates) EXPECT_EQ(template_from_string(to_string(t)), t);
  EXPECT_THROW(template_from_string("dance"), Error);
  EXPECT_TRUE(needs_object_a(TaskTemplate::bring_me));
  EXPECT_FALSE(needs_object_a(TaskTemplate::come_here));
  EXPECT_TRUE(needs_object_b(TaskTemplate::put_on));
  EXPECT_FALSE(needs_object_b(TaskTemplate::where_is));
}

TEST(TaskGen, WhereIsTheOrange) {
  const SceneSpec s = house();
  const TaskInstance t = make_task(TaskTemplate::where_is, s, cat(), 36, std::nullopt, 0);
  EXPECT_EQ(t.instruction, "Where is the orange?");
  EXPECT_EQ(t.answer, std::optional<std::string>("sofa"));
  EXPECT_EQ(t.scene_ref, scene_hash(s));
}

TEST(TaskGen, EligibilityRules) {
  const SceneSpec s = house();
  auto has = [](const auto& v, ObjectId a, ObjectId b = -1) {
    return std::find(v.begin(), v.end(), std::pair<ObjectId, ObjectId>{a, b}) != v.end();
  };
  const auto come = eligible_bindings(TaskTemplate::come_here, s, cat());
  ASSERT_EQ(come.size(), 1u);
  EXPECT_EQ(come[0], (std::pair<ObjectId, ObjectId>{-1, -1}));

  const auto pick = eligible_bindings(TaskTemplate::pick_up, s, cat());
  EXPECT_TRUE(has(pick, 36));
  EXPECT_TRUE(has(pick, 5));
  EXPECT_FALSE(has(pick, 4));   // sofa is not grabbable
  EXPECT_FALSE(has(pick, 6));   // two apples: ambiguous name
  const auto where = eligible_bindings(TaskTemplate::where_is, s, cat());
  EXPECT_TRUE(has(where, 36));
  EXPECT_FALSE(has(where, 9));
  const auto put = eligible_bindings(TaskTemplate::put_on, s, cat());
  EXPECT_TRUE(has(put, 36, 9));
  EXPECT_FALSE(has(put, 36, 4));  // already there
  EXPECT_FALSE(has(put, 5, 36));  // orange is not a receptacle
  for (const auto& [a, b] : put) {
    EXPECT_TRUE(cat().at(s.find_object(a)->asset).is_grabbable);
    EXPECT_TRUE(cat().at(s.find_object(b)->asset).is_receptacle);
    EXPECT_NE(receptacle_of(s, a), std::optional<ObjectId>(b));
  }
}

TEST(TaskGen, InstantiateIsDeterministicAndValid) {
  const SceneSpec s = house();
  for (TaskTemplate t : kAllTemplates) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const TaskInstance a = instantiate_template(t, s, cat(), seed);
      EXPECT_EQ(a, instantiate_template(t, s, cat(), seed));
      EXPECT_EQ(a.object_a.has_value(), needs_object_a(t));
      EXPECT_EQ(a.object_b.has_value(), needs_object_b(t));
      EXPECT_EQ(a.answer.has_value(), t == TaskTemplate::where_is);
      if (a.object_a) EXPECT_NE(s.find_object(*a.object_a), nullptr);
      EXPECT_FALSE(a.instruction.empty());
      EXPECT_EQ(a.instruction.find('{'), std::string::npos);
    }
  }
}

TEST(TaskGen, NoEligibleObjects) {
  const SceneSpec s = open_room();
  EXPECT_THROW(instantiate_template(TaskTemplate::pick_up, s, cat(), 1), NoEligibleObjects);
  EXPECT_NO_THROW(instantiate_template(TaskTemplate::come_here, s, cat(), 1));
}

TEST(TaskGen, PhraseVariants) {
  for (TaskTemplate t : kAllTemplates) {
    for (std::size_t v = 0; v < kPhraseVariants; ++v) {
      const std::string s = render_instruction(t, v, "orange", "coffee table");
      EXPECT_EQ(s.find('{'), std::string::npos) << s;
      if (needs_object_a(t)) EXPECT_NE(s.find("orange"), std::string::npos) << s;
      if (needs_object_b(t)) EXPECT_NE(s.find("coffee table"), std::string::npos) << s;
    }
  }
}

TEST(TaskGen, MapInstruction) {
  const SceneSpec s = house();
  auto m = map_instruction("where is the orange", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::where_is);
  EXPECT_EQ(m->object_a, std::optional<ObjectId>(36));
  EXPECT_EQ(m->answer, std::optional<std::string>("sofa"));
  EXPECT_EQ(m->instruction, "where is the orange");

  m = map_instruction("Come here, please!", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::come_here);

  m = map_instruction("Bring me the cup.", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::bring_me);
  EXPECT_EQ(m->object_a, std::optional<ObjectId>(5));

  m = map_instruction("put the orange on the coffee table", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::put_on);
  EXPECT_EQ(m->object_a, std::optional<ObjectId>(36));
  EXPECT_EQ(m->object_b, std::optional<ObjectId>(9));

  m = map_instruction("go to the bookshelf", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::go_to);

  m = map_instruction("pick up the cup", s, cat());
  ASSERT_TRUE(m);
  EXPECT_EQ(m->tmpl, TaskTemplate::pick_up);

  EXPECT_FALSE(map_instruction("bring me the apple", s, cat()));  // ambiguous
  EXPECT_FALSE(map_instruction("sing a song", s, cat()));
  EXPECT_FALSE(map_instruction("where is the spaceship", s, cat()));
  EXPECT_FALSE(map_instruction("", s, cat()));
}

TEST(TaskGen, ExternalTasksMapOrDrop) {
  const SceneSpec s = house();
  ScriptedModelClient client({nlohmann::json{{"tasks", {"where is the orange", "do a backflip", "come here"}}}.dump()});
  const ExternalTasks out = tasks_for_scene_external(s, cat(), client);
  ASSERT_EQ(out.tasks.size(), 2u);
  EXPECT_EQ(out.dropped, 1);
  EXPECT_EQ(out.tasks[0].tmpl, TaskTemplate::where_is);
  EXPECT_EQ(out.tasks[1].tmpl, TaskTemplate::come_here);
  const auto req = nlohmann::json::parse(client.requests().at(0));
  EXPECT_NE(req["description"].get<std::string>().find("Object 36"), std::string::npos);

  ScriptedModelClient bad({"{\"tasks\": 3}"});
  EXPECT_THROW(tasks_for_scene_external(s, cat(), bad), ClientError);
}
