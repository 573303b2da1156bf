#include "typenet/dataset.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "typenet/common.hpp"

using nlohmann::json;

namespace typenet::dataset {

DatasetVariant variant(int id) {
  switch (id) {
    case 1: return {1, true, true, false, false};
    case 2: return {2, false, true, false, false};
    case 3: return {3, false, false, false, false};
    case 4: return {4, true, true, true, false};
    case 5: return {5, true, true, false, true};
    default: throw UsageError("unknown dataset variant: " + std::to_string(id));
  }
}

std::vector<extract::RawFunction> select_functions(std::vector<extract::RawFunction> fns) {
  std::vector<extract::RawFunction> kept;
  for (auto& fn : fns) {
    // strip the `self` receiver before the annotation check
    for (size_t i = 0; i < fn.params.size();) {
      if (fn.params[i] == "self") {
        fn.params.erase(fn.params.begin() + i);
        fn.param_types.erase(fn.param_types.begin() + i);
        fn.param_comments.erase(fn.param_comments.begin() + i);
      } else {
        ++i;
      }
    }
    bool has_param_type = std::any_of(fn.param_types.begin(), fn.param_types.end(),
                                      [](const auto& t) { return t.has_value(); });
    if (!has_param_type && !fn.return_type) continue;
    if (fn.return_exprs.empty()) continue;
    kept.push_back(std::move(fn));
  }
  return kept;
}

namespace {

std::vector<std::string> comment_tokens(const std::string& text, const nlp::Lexicon& lex) {
  return nlp::preprocess_comment(text, lex).tokens;
}

std::vector<std::string> identifier_tokens(const std::string& name, const nlp::Lexicon& lex) {
  return nlp::preprocess_identifier(name, lex).tokens;
}

}  // namespace

std::vector<Datapoint> to_datapoints(const extract::RawFunction& fn, const DatasetVariant& v,
                                     const nlp::Lexicon& lex) {
  std::vector<Datapoint> points;
  std::string base = fn.project + ":" + fn.path + ":" + fn.qualname + ":" + std::to_string(fn.line);

  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (!fn.param_types[i]) continue;
    if (*fn.param_types[i] == "Any") continue;
    if (v.requires_point_comment && !fn.param_comments[i]) continue;
    Datapoint dp;
    dp.kind = Kind::Parameter;
    dp.name_tokens = identifier_tokens(fn.params[i], lex);
    if (fn.param_comments[i]) dp.comment_tokens = comment_tokens(*fn.param_comments[i], lex);
    dp.label = *fn.param_types[i];
    dp.provenance = base + ":p" + std::to_string(i);
    points.push_back(std::move(dp));
  }

  if (fn.return_type && *fn.return_type != "Any" && *fn.return_type != "None") {
    bool has_fcomment = fn.fn_comment.has_value() || fn.docstring.has_value();
    bool ok = (!v.requires_fn_comment || has_fcomment) &&
              (!v.requires_point_comment || fn.return_comment.has_value());
    if (ok) {
      Datapoint dp;
      dp.kind = Kind::Return;
      dp.fname_tokens = identifier_tokens(fn.name, lex);
      if (fn.fn_comment)
        dp.fcomment_tokens = comment_tokens(*fn.fn_comment, lex);
      else if (fn.docstring)
        dp.fcomment_tokens = comment_tokens(*fn.docstring, lex);
      if (fn.return_comment) dp.rcomment_tokens = comment_tokens(*fn.return_comment, lex);
      for (const auto& expr : fn.return_exprs)
        for (const auto& tok : expr)
          for (auto& t : identifier_tokens(tok, lex)) dp.retexpr_tokens.push_back(std::move(t));
      for (const auto& p : fn.params)
        for (auto& t : identifier_tokens(p, lex)) dp.paramname_tokens.push_back(std::move(t));
      dp.label = *fn.return_type;
      dp.provenance = base + ":ret";
      points.push_back(std::move(dp));
    }
  }
  return points;
}

std::vector<Datapoint> build_datapoints(const std::vector<extract::RawFunction>& selected,
                                        const DatasetVariant& v, const nlp::Lexicon& lex) {
  std::vector<Datapoint> all;
  for (const auto& fn : selected) {
    auto pts = to_datapoints(fn, v, lex);
    all.insert(all.end(), std::make_move_iterator(pts.begin()), std::make_move_iterator(pts.end()));
  }
  return all;
}

SplitDataset split_train_test(std::vector<Datapoint> points, double ratio, uint64_t seed) {
  if (points.empty()) throw DataError("empty dataset: nothing to split");
  Rng rng(seed);
  rng.shuffle(points);
  size_t n_train = static_cast<size_t>(ratio * static_cast<double>(points.size()));
  SplitDataset split;
  split.seed = seed;
  split.train.assign(points.begin(), points.begin() + n_train);
  split.test.assign(points.begin() + n_train, points.end());
  return split;
}

std::string to_jsonl(const std::vector<Datapoint>& points) {
  std::string out;
  for (const auto& dp : points) {
    json j;
    j["kind"] = dp.kind == Kind::Parameter ? "parameter" : "return";
    json t;
    if (dp.kind == Kind::Parameter) {
      t["name"] = dp.name_tokens;
      t["comment"] = dp.comment_tokens;
    } else {
      t["fname"] = dp.fname_tokens;
      t["fcomment"] = dp.fcomment_tokens;
      t["rcomment"] = dp.rcomment_tokens;
      t["retexpr"] = dp.retexpr_tokens;
      t["paramnames"] = dp.paramname_tokens;
    }
    j["tokens"] = t;
    j["label"] = dp.label;
    j["provenance"] = dp.provenance;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Datapoint> from_jsonl(const std::string& jsonl) {
  std::vector<Datapoint> points;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    Datapoint dp;
    dp.kind = j.at("kind") == "parameter" ? Kind::Parameter : Kind::Return;
    const json& t = j.at("tokens");
    if (dp.kind == Kind::Parameter) {
      dp.name_tokens = t.at("name").get<std::vector<std::string>>();
      dp.comment_tokens = t.at("comment").get<std::vector<std::string>>();
    } else {
      dp.fname_tokens = t.at("fname").get<std::vector<std::string>>();
      dp.fcomment_tokens = t.at("fcomment").get<std::vector<std::string>>();
      dp.rcomment_tokens = t.at("rcomment").get<std::vector<std::string>>();
      dp.retexpr_tokens = t.at("retexpr").get<std::vector<std::string>>();
      dp.paramname_tokens = t.at("paramnames").get<std::vector<std::string>>();
    }
    dp.label = j.at("label").get<std::string>();
    dp.provenance = j.at("provenance").get<std::string>();
    points.push_back(std::move(dp));
  }
  return points;
}

}  // namespace typenet::dataset
