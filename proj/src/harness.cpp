#include "folsynth/harness.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace folsynth {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string element_name(int i) { return "a" + std::to_string(i); }

std::string element_set(const std::vector<int>& elems) {
  std::string out = "{";
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i) out += ", ";
    out += element_name(elems[i]);
  }
  out += "}";
  return out;
}

void render_world(std::ostringstream& os, const std::string& name, const PartialWorld& pw) {
  os << "### World: " << name << "\n";
  std::vector<int> domain(pw.n);
  for (int i = 0; i < pw.n; ++i) domain[i] = i;
  os << "Domain: " << element_set(domain) << "\n\n";
  bool partial = !pw.fully_known();
  // Partially observed worlds title their fact block the way the EC
  // observation rules refer to it.
  os << (partial ? "**Known Facts (TRUE):**\n" : "**Predicates:**\n");
  for (char pred : {'P', 'Q'}) {
    os << "- " << pred << ":";
    bool first = true;
    for (int i = 0; i < pw.n; ++i) {
      if (pw.unary(pred, i) == Truth::True) {
        os << (first ? " " : ", ") << element_name(i);
        first = false;
      }
    }
    os << "\n";
  }
  for (char pred : {'R', 'S'}) {
    os << "- " << pred << ":";
    bool first = true;
    for (int i = 0; i < pw.n; ++i) {
      for (int j = 0; j < pw.n; ++j) {
        if (pw.binary(pred, i, j) == Truth::True) {
          os << (first ? " (" : ", (") << element_name(i) << ", " << element_name(j)
             << ")";
          first = false;
        }
      }
    }
    os << "\n";
  }
  std::vector<GroundAtom> unknowns = pw.unknown_atoms();
  if (!unknowns.empty()) {
    os << "\n**Unknown Atoms** (truth value hidden):\n";
    for (char pred : {'P', 'Q', 'R', 'S'}) {
      bool any = false;
      for (const GroundAtom& atom : unknowns) {
        if (atom.pred != pred) continue;
        if (!any) os << "- " << pred << ":";
        os << (any ? ", " : " ");
        if (atom.b < 0) {
          os << element_name(atom.a);
        } else {
          os << "(" << element_name(atom.a) << ", " << element_name(atom.b) << ")";
        }
        any = true;
      }
      if (any) os << "\n";
    }
  }
  std::vector<int> t_true, t_false;
  for (int i = 0; i < pw.n; ++i) {
    (pw.target[i] ? t_true : t_false).push_back(i);
  }
  os << "\n**Target T(x):**\n";
  os << "- T is TRUE for: " << element_set(t_true) << "\n";
  os << "- T is FALSE for: " << element_set(t_false) << "\n\n";
}

const char* kOutputFormat = R"PROMPT(## Output Format

You must output your formula in S-expression syntax. The grammar is:

phi ::= (P x)             -- unary predicate applied to variable
      | (R x y)           -- binary predicate applied to two variables
      | (= x y)           -- equality of two variables
      | (not phi)         -- negation
      | (and phi1 phi2)   -- conjunction (2 or more arguments)
      | (or phi1 phi2)    -- disjunction (2 or more arguments)
      | (forall v phi)    -- universal quantification
      | (exists v phi)    -- existential quantification

**Important constraints:**
- Your formula must have exactly one free variable: x
- All other variables must be bound by quantifiers (forall or exists)
- Variable names should be: x (free), y, z, w (bound by quantifiers)
- Prefer simpler formulas; avoid redundant conjuncts and case-splitting

)PROMPT";

const char* kOutputContract = R"PROMPT(## Output

Your final answer must be exactly ONE LINE containing ONLY valid JSON:
- "formula": a single S-expression formula string with one free variable x
- "description": a short plain-English description (one sentence)

Example:
{"formula":"(exists y (and (R x y) (P y)))","description":"x has an R-successor that satisfies P."}
)PROMPT";

std::string render_fullobs(const ProblemInstance& inst) {
  std::ostringstream os;
  os << R"PROMPT(# First-Order Logic Concept Synthesis

## Task Overview

You are given several finite "worlds," each containing:
- A finite domain of objects (named a0, a1, a2, ...)
- Interpretations of predicates (which objects/pairs satisfy each predicate)
- A target concept T(x) that specifies which objects are "positive" (T is TRUE)
  and which are "negative" (T is FALSE)

**Closed World Assumption**: Only the facts explicitly listed as TRUE are true.
Any predicate application (P(a), R(a,b), etc.) not explicitly listed should be
assumed FALSE.

**Your goal**: Find a first-order logic formula phi(x) with one free variable x
that **perfectly separates** the positive and negative examples:
- phi(c) must evaluate to TRUE for every object c where T(c) is TRUE
- phi(c) must evaluate to FALSE for every object c where T(c) is FALSE

The formula must work correctly for ALL objects in ALL training worlds.

)PROMPT";
  os << kOutputFormat;
  os << "## Problem Instance\n\n## Training Worlds (learn from these):\n\n";
  int index = 0;
  for (const InstanceWorld& iw : inst.worlds) {
    render_world(os, "train_" + std::to_string(index++), iw.world);
  }
  os << R"PROMPT(## Your Task

Analyze the training worlds carefully. Identify what **distinguishes** objects
where T is TRUE from objects where T is FALSE.

**Think step by step:**
1. For each training world, compare the T-TRUE objects against the T-FALSE objects
2. Look for properties (unary predicates P, Q) or relationships (binary predicates
   R, S) that correlate with T
3. Check: Do all T-TRUE objects share some property? Do all T-FALSE objects lack it?
4. Consider whether the pattern involves existential quantification
   ("there exists a y such that...") or universal quantification ("for all y...")
5. Formulate your hypothesis as an S-expression formula
6. Verify: For each object in each training world, check that your formula gives
   TRUE exactly when T is TRUE

)PROMPT";
  os << kOutputContract;
  return os.str();
}

std::string render_ci(const ProblemInstance& inst) {
  std::ostringstream os;
  os << R"PROMPT(# First-Order Logic Concept Synthesis (Zendo-Style)

## Task Overview

You are given two sets of finite "worlds":
- **YES worlds**: Worlds where the hidden rule is satisfied
- **NO worlds**: Worlds where the hidden rule is NOT satisfied

Each world contains:
- A finite domain of objects (named a0, a1, a2, ...)
- Interpretations of predicates (which objects/pairs satisfy each predicate)
- A target concept T(x) that labels certain objects as "positive examples"

**Closed World Assumption**: Only the facts explicitly listed as TRUE are true.

Your goal is to find a first-order logic formula phi(x) with one free variable x
such that:
- In YES worlds: phi(x) **exactly matches** T(x) for all objects
- In NO worlds: phi(x) **fails to match** T(x) -- at least one object is misclassified

Think of this like the game Zendo: you must find the secret rule that all YES
worlds follow but NO worlds violate.

## Validity Criterion (Important)

Define **Match(W, phi)** := for all a in domain(W): W |= phi(a) iff a in T_true(W)

Your formula is **correct** iff:
1. For every YES world W: Match(W, phi) is TRUE
2. For every NO world W: Match(W, phi) is FALSE

This means your formula must work perfectly in YES worlds, and must have at least
one error in each NO world.

)PROMPT";
  os << kOutputFormat;
  os << "## Problem Instance\n\n## YES Worlds:\n\n";
  int yes_index = 0, no_index = 0;
  for (const InstanceWorld& iw : inst.worlds) {
    if (iw.role == WorldRole::Yes) {
      render_world(os, "yes_" + std::to_string(yes_index++), iw.world);
    }
  }
  os << "## NO Worlds:\n\n";
  for (const InstanceWorld& iw : inst.worlds) {
    if (iw.role == WorldRole::No) {
      render_world(os, "no_" + std::to_string(no_index++), iw.world);
    }
  }
  os << R"PROMPT(## Your Task

Analyze the YES and NO worlds carefully. Find the pattern that:
1. Perfectly matches T in all YES worlds
2. Fails to match T in all NO worlds

)PROMPT";
  os << kOutputContract;
  return os.str();
}

std::string render_ec(const ProblemInstance& inst) {
  std::ostringstream os;
  os << R"PROMPT(# First-Order Logic Concept Synthesis (Partial Observation)

## Task Overview

You are given several finite "worlds" with **partial observations**:
- Some predicate facts are **known** (observed as TRUE or FALSE)
- Some predicate facts are **unknown** (not observed)

Each world contains:
- A finite domain of objects (named a0, a1, a2, ...)
- Known facts: predicates whose truth values have been observed
- Unknown atoms: predicates whose truth values are hidden
- A target concept T(x) that specifies which objects are "positive" (T is TRUE)
  and which are "negative" (T is FALSE)

**Observation Rules**:
- Atoms listed under "Known Facts" with explicit TRUE values are TRUE
- Atoms listed under "Unknown Atoms" have unknown truth values
- Any atom NOT listed as TRUE and NOT listed as Unknown is FALSE

The target T(x) values are always fully specified (not unknown).

**Your goal**: Find a first-order logic formula phi(x) with one free variable x
that **perfectly separates** the positive and negative examples:
- phi(c) must be TRUE for every object c where T(c) is TRUE
- phi(c) must be FALSE for every object c where T(c) is FALSE

**Completion semantics**: For each world separately, there must exist at least one
assignment of truth values to the unknown atoms such that phi matches T for all
objects in that world.

)PROMPT";
  os << kOutputFormat;
  os << "## Problem Instance\n\n## Training Worlds (learn from these):\n\n";
  int index = 0;
  for (const InstanceWorld& iw : inst.worlds) {
    render_world(os, "train_" + std::to_string(index++), iw.world);
  }
  os << R"PROMPT(## Your Task
Analyze the training worlds carefully, keeping in mind that some facts are unknown.

**Think step by step:**
1. For each training world, compare objects where T is TRUE vs. T is FALSE
2. Note which predicate facts are known vs unknown
3. Look for patterns that **distinguish** T-TRUE objects from T-FALSE objects
   using the known facts
4. Consider whether the pattern involves existential or universal quantification
5. Formulate your hypothesis as an S-expression formula
6. Verify: Check that your formula gives TRUE exactly when T is TRUE, and FALSE
   exactly when T is FALSE (under some valid completion of unknowns)

**Key insight**: Your formula should work based on the known facts. Focus on
patterns that depend on observed predicates.

)PROMPT";
  os << kOutputContract;
  return os.str();
}

} // namespace

std::string render_prompt(const ProblemInstance& instance) {
  switch (instance.task) {
    case Task::FullObs: return render_fullobs(instance);
    case Task::CI: return render_ci(instance);
    case Task::EC: return render_ec(instance);
  }
  return render_fullobs(instance);
}

// ---------------------------------------------------------------------------
// Response extraction

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n`");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n`");
  return std::string(s.substr(b, e - b + 1));
}

// The line must carry one complete JSON object holding a "formula" string.
bool try_parse_object(const std::string& line, ordered_json& out) {
  std::size_t open = line.find('{');
  std::size_t close = line.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return false;
  try {
    ordered_json j = ordered_json::parse(line.substr(open, close - open + 1));
    if (!j.is_object() || !j.contains("formula") || !j["formula"].is_string()) return false;
    out = std::move(j);
    return true;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

} // namespace

Prediction extract_formula(std::string_view raw) {
  Prediction p;
  p.raw_text = std::string(raw);
  if (trim(raw).empty()) {
    p.status = PredStatus::Missing;
    return p;
  }
  std::vector<std::string> lines;
  {
    std::string current;
    for (char c : raw) {
      if (c == '\n') {
        lines.push_back(current);
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    lines.push_back(current);
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    ordered_json obj;
    if (!try_parse_object(trim(*it), obj)) continue;
    try {
      p.formula = parse(obj["formula"].get<std::string>());
      p.status = PredStatus::Ok;
      if (obj.contains("description") && obj["description"].is_string()) {
        p.description = obj["description"].get<std::string>();
      }
    } catch (const ParseError&) {
      p.status = PredStatus::ParseError;
    }
    return p;
  }
  p.status = PredStatus::ParseError;
  return p;
}

// ---------------------------------------------------------------------------
// External adapter protocol

namespace {

struct ChildResult {
  int exit_code = -1;
  std::string stdout_text;
};

ChildResult run_child(const std::string& command, const std::string& input) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw AdapterProtocolError("cannot create adapter pipes");
  }
  pid_t pid = fork();
  if (pid < 0) throw AdapterProtocolError("cannot fork adapter process");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);
  ChildResult result;
  char buf[4096];
  ssize_t n;
  while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0) {
    result.stdout_text.append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

} // namespace

std::vector<SolverResponse> run_external_solver(const std::vector<SolverRequest>& requests,
                                                const std::string& adapter_cmd,
                                                const RetryPolicy& policy) {
  std::vector<SolverResponse> responses;
  responses.reserve(requests.size());
  for (const SolverRequest& req : requests) {
    ordered_json req_doc;
    req_doc["instance_id"] = req.instance_id;
    req_doc["task"] = task_name(req.task);
    req_doc["prompt"] = req.prompt;
    std::string input = req_doc.dump() + "\n";

    SolverResponse resp;
    resp.instance_id = req.instance_id;
    resp.missing = true;
    double backoff = policy.initial_backoff_s;
    auto start = std::chrono::steady_clock::now();
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
      resp.attempts = attempt;
      ChildResult child = run_child(adapter_cmd, input);
      if (child.exit_code == 0) {
        // Last non-empty stdout line is the response document.
        std::string last_line;
        std::istringstream ss(child.stdout_text);
        std::string line;
        while (std::getline(ss, line)) {
          if (!trim(line).empty()) last_line = line;
        }
        try {
          ordered_json doc = ordered_json::parse(last_line);
          std::string id = doc.at("instance_id").get<std::string>();
          if (id != req.instance_id) {
            throw AdapterProtocolError("adapter answered for a different instance id");
          }
          resp.raw_text = doc.at("text").get<std::string>();
          resp.missing = false;
          break;
        } catch (const nlohmann::json::exception&) {
          // malformed output: retry
        } catch (const AdapterProtocolError&) {
          // id mismatch: retry
        }
      }
      if (attempt < policy.max_attempts && backoff > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff *= policy.backoff_multiplier;
      }
    }
    resp.latency_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    responses.push_back(std::move(resp));
  }
  return responses;
}

// ---------------------------------------------------------------------------
// Baseline solver

std::vector<Template> baseline_candidates(const FrozenPool& pool) {
  std::vector<Template> out;
  std::set<std::string> seen;
  for (const Template& t : builtin_templates()) {
    if (seen.insert(t.text).second) out.push_back(t);
  }
  for (const Template* t : pool.all()) {
    if (seen.insert(t->text).second) out.push_back(*t);
  }
  return out;
}

Prediction baseline_solve(const ProblemInstance& instance,
                          const std::vector<Template>& candidates, SolveBudget budget) {
  std::vector<const Template*> order;
  order.reserve(candidates.size());
  for (const Template& t : candidates) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Template* a, const Template* b) {
    if (a->ast != b->ast) return a->ast < b->ast;
    return a->text < b->text;
  });

  std::vector<World> train, yes, no;
  std::vector<PartialWorld> partials;
  switch (instance.task) {
    case Task::FullObs:
      train = instance.full_train_worlds();
      break;
    case Task::CI:
      yes = instance.full_worlds(WorldRole::Yes);
      no = instance.full_worlds(WorldRole::No);
      break;
    case Task::EC:
      partials = instance.partial_worlds();
      break;
  }

  Prediction p;
  p.instance_id = instance.id;
  p.model = "baseline";
  for (const Template* t : order) {
    bool solved = false;
    switch (instance.task) {
      case Task::FullObs:
        solved = solves_fullobs(t->formula, train);
        break;
      case Task::CI:
        solved = solves_ci(t->formula, yes, no);
        break;
      case Task::EC:
        solved = ec_valid_instance(t->formula, partials, budget);
        break;
    }
    if (solved) {
      p.status = PredStatus::Ok;
      p.formula = t->formula;
      p.description = "enumeration baseline candidate";
      ordered_json j;
      j["formula"] = t->text;
      j["description"] = p.description;
      p.raw_text = j.dump();
      return p;
    }
  }
  p.status = PredStatus::Missing;
  return p;
}

} // namespace folsynth
