#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "typenet/extract.hpp"
#include "typenet/nlp.hpp"

namespace typenet::dataset {

enum class Kind { Parameter, Return };

// One prediction instance. Parameter points use name/comment tokens; return
// points use the five function-level fields. Unused fields stay empty.
struct Datapoint {
  Kind kind = Kind::Parameter;
  std::vector<std::string> name_tokens;
  std::vector<std::string> comment_tokens;
  std::vector<std::string> fname_tokens;
  std::vector<std::string> fcomment_tokens;
  std::vector<std::string> rcomment_tokens;
  std::vector<std::string> retexpr_tokens;
  std::vector<std::string> paramname_tokens;
  std::string label;       // never "Any"; never "None" for return points
  std::string provenance;  // project:path:qualname:line:slot
};

struct DatasetVariant {
  int id = 1;
  // c_p required for parameter points and c_r for return points
  bool requires_point_comment = true;
  // a function comment (c_f, or the docstring fallback) required for
  // return points
  bool requires_fn_comment = true;
  bool zero_return_exprs = false;   // variant 4
  bool drop_return_expr_rows = false;  // variant 5
};

DatasetVariant variant(int id);  // 1..5

// §-style selection: keeps functions with at least one annotated slot and
// at least one return expression; strips `self` receivers.
std::vector<extract::RawFunction> select_functions(std::vector<extract::RawFunction> fns);

std::vector<Datapoint> to_datapoints(const extract::RawFunction& fn, const DatasetVariant& v,
                                     const nlp::Lexicon& lex);

std::vector<Datapoint> build_datapoints(const std::vector<extract::RawFunction>& selected,
                                        const DatasetVariant& v, const nlp::Lexicon& lex);

struct SplitDataset {
  std::vector<Datapoint> train;
  std::vector<Datapoint> test;
  uint64_t seed = 0;
};

// Seeded uniform shuffle, then train = floor(ratio * n) prefix.
SplitDataset split_train_test(std::vector<Datapoint> points, double ratio, uint64_t seed);

std::string to_jsonl(const std::vector<Datapoint>& points);
std::vector<Datapoint> from_jsonl(const std::string& jsonl);

}  // namespace typenet::dataset
