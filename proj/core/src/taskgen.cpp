#include "hearth/taskgen.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <nlohmann/json.hpp>

#include "hearth/rng.hpp"

namespace hearth {

namespace {

using Phrases = std::array<std::string_view, kPhraseVariants>;

const Phrases kComeHere{"Come here.", "Come to me.", "Please come over here."};
const Phrases kGoTo{"Go to the {A}.", "Walk over to the {A}.", "Please head to the {A}."};
const Phrases kPickUp{"Pick up the {A}.", "Grab the {A}.", "Please take the {A}."};
const Phrases kBringMe{"Bring me the {A}.", "Can you bring the {A} to me?", "Fetch me the {A}."};
const Phrases kWhereIs{"Where is the {A}?", "Find the {A}.", "Can you tell me where the {A} is?"};
const Phrases kPutOn{"Put the {A} on the {B}.", "Place the {A} on the {B}.", "Move the {A} onto the {B}."};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
}

bool grab_ready(const SceneSpec& scene, const AssetCatalog& catalog, const ObjectInstance& o) {
  if (!catalog.at(o.asset).is_grabbable) return false;
  for (const auto& other : scene.objects)
    if (other.parent_receptacle == o.id) return false;
  if (o.parent_receptacle) {
    const auto* p = scene.find_object(*o.parent_receptacle);
    if (p && p->open_state == false) return false;
  }
  return true;
}

bool put_ready(const AssetCatalog& catalog, const ObjectInstance& o) {
  const auto& a = catalog.at(o.asset);
  return a.is_receptacle && !a.is_grabbable && (!a.is_openable || o.open_state == true);
}

/// Lowercase text with punctuation turned into spaces and a space on each side.
std::string normalize(std::string_view s) {
  std::string out = " ";
  for (char c : s) {
    const unsigned char u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : ' ';
  }
  out += ' ';
  std::string squeezed;
  for (char c : out)
    if (!(c == ' ' && !squeezed.empty() && squeezed.back() == ' ')) squeezed += c;
  return squeezed;
}

bool has_word(const std::string& text, std::string_view phrase) {
  return text.find(" " + std::string(phrase) + " ") != std::string::npos;
}

}  // namespace

const std::array<std::string_view, kPhraseVariants>& phrase_variants(TaskTemplate t) {
  switch (t) {
    case TaskTemplate::come_here: return kComeHere;
    case TaskTemplate::go_to: return kGoTo;
    case TaskTemplate::pick_up: return kPickUp;
    case TaskTemplate::bring_me: return kBringMe;
    case TaskTemplate::where_is: return kWhereIs;
    case TaskTemplate::put_on: return kPutOn;
  }
  return kComeHere;
}

std::string render_instruction(TaskTemplate t, std::size_t variant, std::string_view a_name, std::string_view b_name) {
  std::string s(phrase_variants(t)[variant % kPhraseVariants]);
  replace_all(s, "{A}", a_name);
  replace_all(s, "{B}", b_name);
  return s;
}

std::vector<ObjectId> uniquely_named_objects(const SceneSpec& scene) {
  std::map<std::string, int> count;
  for (const auto& o : scene.objects) ++count[o.asset];
  std::vector<ObjectId> out;
  for (const auto& o : scene.objects)
    if (count[o.asset] == 1) out.push_back(o.id);
  return out;
}

std::vector<std::pair<ObjectId, ObjectId>> eligible_bindings(TaskTemplate t, const SceneSpec& scene,
                                                              const AssetCatalog& catalog) {
  std::vector<std::pair<ObjectId, ObjectId>> out;
  if (t == TaskTemplate::come_here) {
    out.emplace_back(-1, -1);
    return out;
  }
  const auto named = uniquely_named_objects(scene);
  for (ObjectId a : named) {
    const auto& oa = *scene.find_object(a);
    switch (t) {
      case TaskTemplate::go_to: out.emplace_back(a, -1); break;
      case TaskTemplate::pick_up:
      case TaskTemplate::bring_me:
        if (grab_ready(scene, catalog, oa)) out.emplace_back(a, -1);
        break;
      case TaskTemplate::where_is:
        if (catalog.at(oa.asset).is_grabbable && oa.parent_receptacle) out.emplace_back(a, -1);
        break;
      case TaskTemplate::put_on:
        if (!grab_ready(scene, catalog, oa)) break;
        for (ObjectId b : named) {
          if (b == a || oa.parent_receptacle == b) continue;
          if (put_ready(catalog, *scene.find_object(b))) out.emplace_back(a, b);
        }
        break;
      case TaskTemplate::come_here: break;
    }
  }
  return out;
}

TaskInstance make_task(TaskTemplate t, const SceneSpec& scene, const AssetCatalog& catalog, std::optional<ObjectId> a,
                       std::optional<ObjectId> b, std::size_t variant) {
  TaskInstance task;
  task.tmpl = t;
  task.scene_ref = scene_hash(scene);
  auto name_of = [&](std::optional<ObjectId> id) -> std::string {
    if (!id) return {};
    const auto* o = scene.find_object(*id);
    if (!o) throw Error("task binds unknown object " + std::to_string(*id));
    return catalog.at(o->asset).display_name();
  };
  if (needs_object_a(t)) {
    if (!a) throw Error(std::string(to_string(t)) + " needs object A");
    task.object_a = a;
  }
  if (needs_object_b(t)) {
    if (!b) throw Error(std::string(to_string(t)) + " needs object B");
    task.object_b = b;
  }
  task.instruction = render_instruction(t, variant, name_of(task.object_a), name_of(task.object_b));
  if (t == TaskTemplate::where_is) {
    const auto parent = receptacle_of(scene, *task.object_a);
    if (!parent) throw NoEligibleObjects("where_is object has no receptacle");
    task.answer = name_of(parent);
  }
  return task;
}

TaskInstance instantiate_template(TaskTemplate t, const SceneSpec& scene, const AssetCatalog& catalog,
                                  std::uint64_t rng_seed) {
  const auto bindings = eligible_bindings(t, scene, catalog);
  if (bindings.empty()) throw NoEligibleObjects(std::string("no eligible objects for ") + std::string(to_string(t)));
  Rng rng(rng_seed);
  const auto [a, b] = bindings[rng.index(bindings.size())];
  const std::size_t variant = rng.index(kPhraseVariants);
  return make_task(t, scene, catalog, a >= 0 ? std::optional<ObjectId>(a) : std::nullopt,
                   b >= 0 ? std::optional<ObjectId>(b) : std::nullopt, variant);
}

std::optional<TaskInstance> map_instruction(std::string_view text, const SceneSpec& scene,
                                            const AssetCatalog& catalog) {
  const std::string s = normalize(text);
  // Object mentions in textual order, longest names first so "coffee table" beats "table".
  struct Mention {
    std::size_t at;
    ObjectId id;
  };
  std::vector<Mention> mentions;
  std::vector<std::pair<std::string, ObjectId>> names;
  for (ObjectId id : uniquely_named_objects(scene))
    names.emplace_back(normalize(catalog.at(scene.find_object(id)->asset).display_name()), id);
  std::sort(names.begin(), names.end(), [](const auto& x, const auto& y) {
    return x.first.size() != y.first.size() ? x.first.size() > y.first.size() : x.second < y.second;
  });
  std::string masked = s;
  for (const auto& [name, id] : names) {
    for (std::size_t at = masked.find(name); at != std::string::npos; at = masked.find(name, at + 1)) {
      mentions.push_back({at, id});
      for (std::size_t k = at + 1; k + 1 < at + name.size(); ++k) masked[k] = '#';
    }
  }
  std::sort(mentions.begin(), mentions.end(), [](const Mention& x, const Mention& y) { return x.at < y.at; });
  std::vector<ObjectId> ids;
  for (const auto& m : mentions)
    if (std::find(ids.begin(), ids.end(), m.id) == ids.end()) ids.push_back(m.id);

  auto bound = [&](TaskTemplate t, std::optional<ObjectId> a, std::optional<ObjectId> b) -> std::optional<TaskInstance> {
    const auto elig = eligible_bindings(t, scene, catalog);
    const std::pair<ObjectId, ObjectId> key{a.value_or(-1), b.value_or(-1)};
    if (std::find(elig.begin(), elig.end(), key) == elig.end()) return std::nullopt;
    TaskInstance task = make_task(t, scene, catalog, a, b, 0);
    task.instruction = std::string(text);
    return task;
  };

  const bool put = has_word(s, "put") || has_word(s, "place") || has_word(s, "move") || has_word(s, "set");
  if (put && (has_word(s, "on") || has_word(s, "onto")) && ids.size() >= 2)
    return bound(TaskTemplate::put_on, ids[0], ids[1]);
  if (ids.size() == 1) {
    if (has_word(s, "bring") || has_word(s, "fetch")) return bound(TaskTemplate::bring_me, ids[0], std::nullopt);
    if (has_word(s, "where") || has_word(s, "find") || has_word(s, "locate"))
      return bound(TaskTemplate::where_is, ids[0], std::nullopt);
    if (has_word(s, "pick up") || has_word(s, "pick") || has_word(s, "grab") || has_word(s, "take"))
      return bound(TaskTemplate::pick_up, ids[0], std::nullopt);
    if (has_word(s, "go to") || has_word(s, "walk") || has_word(s, "head") || has_word(s, "go") ||
        has_word(s, "navigate"))
      return bound(TaskTemplate::go_to, ids[0], std::nullopt);
    return std::nullopt;
  }
  if (ids.empty() && has_word(s, "come") &&
      (has_word(s, "here") || has_word(s, "me") || has_word(s, "over")))
    return bound(TaskTemplate::come_here, std::nullopt, std::nullopt);
  return std::nullopt;
}

ExternalTasks tasks_for_scene_external(const SceneSpec& scene, const AssetCatalog& catalog, ModelClient& client) {
  nlohmann::json req{
      {"description", describe_scene(scene, catalog)},
      {"instruction",
       "You are a person living in this house. Propose short commands you might give a household robot, "
       "one per entry, such as asking it to come to you, fetch an object, or tell you where something is."}};
  const std::string reply = client.complete(req.dump());
  std::vector<std::string> lines;
  try {
    const auto j = nlohmann::json::parse(reply);
    if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array())
      throw ClientError("task reply must be an object with a list field 'tasks'");
    for (const auto& t : j["tasks"]) {
      if (!t.is_string()) throw ClientError("task entries must be strings");
      lines.push_back(t.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ClientError(std::string("task reply is not valid JSON: ") + e.what());
  }
  ExternalTasks out;
  for (const auto& line : lines) {
    if (auto t = map_instruction(line, scene, catalog))
      out.tasks.push_back(std::move(*t));
    else
      ++out.dropped;
  }
  return out;
}

}  // namespace hearth
