// Relation-inference prompt: instructions, relationship definitions, the
// mandatory JSON output schema, few-shot examples, and the per-target input
// section. One prompt covers all candidates for a target organization.
#pragma once

#include <string>
#include <vector>

#include "orgmap/chunk.hpp"
#include "orgmap/jsonl.hpp"

namespace orgmap {

inline const std::string& prompt_template() {
  static const std::string kTemplate = R"PROMPT(You are an expert at determining how organizations that own or control Autonomous System (AS) numbers in computer networks are related, using the provided context.

You will receive:
1) A **base_organization**.
2) A list of **candidate_organizations**.
3) **context** providing relevant organizational details.

### Definitions
For each (base_organization, candidate_organization) pair, decide which of the following relationships best applies:

- Alias
  Both names refer to exactly the same legal entity or one is a historical name of the other.

- Parent/Subsidiary
  One organization has acquired or holds more than 50% of the other.
  Choose between "base_organization" or "candidate_organization".

- No_relation
  There is insufficient evidence of alias, ownership or acquisition linking them.

**Mandatory JSON Output Format**:
Your output must be in valid JSON format only, with no extra text or commentary. Use the structure:

{
   "base_org_name": <Name of base organization>,
   "candidate_org_name": <Name of candidate organization>,
   "reasoning for Alias": <Explanation for why this pair is or is not Alias>,
   "reasoning for Parent/Subsidiary": <Explanation for why this pair is or is not Parent/Subsidiary>,
   "relationship": <One of "Alias", "Parent/Subsidiary", or "No_relation">,
   "parent": <If Parent/Subsidiary, indicate "base" or "candidate"; otherwise leave empty>,
   "parent name": <If Parent/Subsidiary, exactly match the relevant org name from "base_organization" or "candidate_organization"; otherwise leave empty>
}

### Example:
Provide this JSON object for each (base_organization, candidate_organization) pair as an array for output. Examples:
[
   {
      "base_org_name": "Zayo Bandwidth",
      "candidate_org_name": "company",
      "reasoning for Alias": "The candidate name is generic and lacks direct evidence connecting it to Zayo Bandwidth.",
      "reasoning for Parent/Subsidiary": "No indication of ownership or acquisition.",
      "relationship": "No_relation",
      "parent": "",
      "parent name": ""
   },
   {
      "base_org_name": "Google inc.",
      "candidate_org_name": "YouTube",
      "reasoning for Alias": "Google inc. acquired YouTube in 2006, so they are not aliases but parent and child.",
      "reasoning for Parent/Subsidiary": "YouTube is a subsidiary of Google inc.",
      "relationship": "Parent/Subsidiary",
      "parent": "base",
      "parent name": "Google inc."
   },
   {
      "base_org_name": "Google inc.",
      "candidate_org_name": "google",
      "reasoning for Alias": "The name 'google' consistently refers to the same entity 'Google Inc.'",
      "reasoning for Parent/Subsidiary": "No separate ownership details suggest a parent/subsidiary relationship.",
      "relationship": "Alias",
      "parent": "",
      "parent name": ""
   }
]

### Input
"base_organization": {base_org}

"candidate_organizations": {target_org}

"Context": {context}

Now, respond by considering each candidate_organization in the list, applying reasoning, and returning your final JSON array with one object per candidate.
)PROMPT";
  return kTemplate;
}

namespace detail {

inline std::string replace_placeholder(std::string text, const std::string& key,
                                       const std::string& value) {
  size_t pos = text.find(key);
  while (pos != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos = text.find(key, pos + value.size());
  }
  return text;
}

}  // namespace detail

// Context chunks are concatenated with source-URL headers, in the order given
// (callers pass them in canonical retrieval order).
inline std::string build_prompt(const std::string& base_org,
                                const std::vector<std::string>& candidates,
                                const std::vector<TextChunk>& context) {
  json cand = json::array();
  for (auto& c : candidates) cand.push_back(c);
  std::string ctx;
  for (auto& chunk : context) {
    ctx += "[Source: " + chunk.url + "]\n";
    ctx += chunk.text;
    ctx += "\n\n";
  }
  std::string out = prompt_template();
  out = detail::replace_placeholder(out, "{base_org}", base_org);
  out = detail::replace_placeholder(out, "{target_org}", cand.dump());
  out = detail::replace_placeholder(out, "{context}", ctx);
  return out;
}

}  // namespace orgmap
