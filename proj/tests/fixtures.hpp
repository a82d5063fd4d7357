#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "amrec/corpus.hpp"
#include "amrec/factor.hpp"
#include "amrec/graph.hpp"

namespace amrec::testing {

inline std::string method_id(int j) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "m%02d", j);
    return buf;
}

// Five evaluable tasks over 60 training methods m00..m59, plus cold-start cases.
//
//   filler  train: m00..m59                       (never tested)
//   t1      train: m00          test: m01 m02 m03, m00 (dropped as already in train)
//   t2      train: m00..m04     test: m05 m14 m15 m34 m54
//   t3      train: m10          test: m20 m59
//   t4      train: m00..m49     test: m50..m59
//   t5      train: m30          test: m29, m99 (cold method)
//   t6      (no train)          test: m01                (cold task)
//   t7      train: m00          test: m98                (only cold methods)
//
// With scores decreasing in method index each task's ranking is simply its
// non-training methods in index order. Hits per task at N = 10 / 30 / 50:
//
//   t1: 3 3 3   t2: 2 4 5   t3: 0 1 1   t4: 10 10 10   t5: 0 1 1
//
// Macro P@10 = (3+2+0+10+0)/(5*10) = 15/50  = 30%
// Macro P@30 = (3+4+1+10+1)/(5*30) = 19/150 = 12.666..%
// Macro P@50 = (3+5+1+10+1)/(5*50) = 20/250 = 8%
// Micro P@50 = 20 / (50+50+50+10+50) = 20/210
struct HandEvalCase {
    SplitDataset ds;
    long hits10 = 15, hits30 = 19, hits50 = 20;
    std::size_t tasks = 5;
    std::size_t cold_start_tasks = 2;
    std::size_t cold_start_relations = 3;
    std::size_t removed_duplicates = 1;
    long micro_returned50 = 210;
};

inline HandEvalCase hand_eval_case() {
    ConceptTable concepts;
    for (const char* t : {"filler", "t1", "t2", "t3", "t4", "t5", "t6", "t7"}) {
        concepts.insert({t, ConceptKind::Task, t, 2000});
    }
    for (int j = 0; j < 60; ++j) concepts.insert({method_id(j), ConceptKind::Method, method_id(j), 2000});
    concepts.insert({"m98", ConceptKind::Method, "m98", 2000});
    concepts.insert({"m99", ConceptKind::Method, "m99", 2000});

    std::vector<RelationRecord> rel;
    auto train = [&](const std::string& t, int j) {
        rel.push_back({t, method_id(j), RelationKind::TaskMethod, 2005, "p"});
    };
    auto test = [&](const std::string& t, const std::string& m) {
        rel.push_back({t, m, RelationKind::TaskMethod, 2010, "q"});
    };
    for (int j = 0; j < 60; ++j) train("filler", j);
    train("t1", 0);
    for (int j = 0; j < 5; ++j) train("t2", j);
    train("t3", 10);
    for (int j = 0; j < 50; ++j) train("t4", j);
    train("t5", 30);
    train("t7", 0);

    for (int j : {1, 2, 3, 0}) test("t1", method_id(j));
    for (int j : {5, 14, 15, 34, 54}) test("t2", method_id(j));
    for (int j : {20, 59}) test("t3", method_id(j));
    for (int j = 50; j < 60; ++j) test("t4", method_id(j));
    test("t5", "m29");
    test("t5", "m99");
    test("t6", "m01");
    test("t7", "m98");

    HandEvalCase c;
    c.ds = temporal_split(rel, 2008, concepts);
    return c;
}

// k = 1 model whose scores strictly decrease with method index.
inline FactorModel descending_model(const RelationMatrix& R) {
    FactorModel model;
    model.hp.k = 1;
    model.hp.variant = Variant::MF;
    model.tasks = FactorMatrix::Ones(static_cast<Eigen::Index>(R.rows()), 1);
    model.methods.resize(static_cast<Eigen::Index>(R.cols()), 1);
    for (Eigen::Index j = 0; j < model.methods.rows(); ++j) {
        model.methods(j, 0) = 1.0 - static_cast<double>(j) / static_cast<double>(R.cols());
    }
    return model;
}

}  // namespace amrec::testing
