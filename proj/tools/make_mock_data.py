# Copyright 2026 The AmbigNLG Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the offline fixtures under data/mock/.

Usage: python3 tools/make_mock_data.py [out_dir]
"""

import json
import os
import sys

CLAUSES = {
    "Context": "Additional context:",
    "Keywords": "in your response.",
    "Length": "Answer with",
    "Planning": "following outline:",
    "Style": "Write in a",
    "Theme": "Primarily discuss",
}

# Each instance: raw fields, LLM filler responses, which categories the
# downstream mock rewards, and the responses it gives without a clarification.
INSTANCES = [
    {
        "id": "qa-solar",
        "task": "Question Answering",
        "instruction": "Answer the question about the passage.",
        "input": "Passage: Solar panels convert sunlight into electricity using photovoltaic "
                 "cells. Question: How do solar panels help households?",
        "output": "Solar panels let households generate their own electricity from sunlight, "
                  "which lowers energy bills and reduces reliance on the grid.",
        "fillers": {
            "Context": "Additional context: Households can use the power they generate "
                       "themselves and export any surplus to the utility.",
            "Planning": "1. how the panels produce power\n2. effect on monthly bills\n"
                        "3. less dependence on utilities",
            "Style": "concise and explanatory",
            "Theme": "Primarily discuss the following theme: everyday savings for families.",
        },
        "rewarded": ["Context", "Keywords", "Length", "Planning", "Style", "Theme"],
        "close": [
            "Solar panels let households generate their own electricity from sunlight, which "
            "lowers energy bills and reduces reliance on the grid.",
            "Solar panels let households make their own electricity from sunlight, which "
            "lowers their energy bills and reduces reliance on the grid.",
            "By generating their own electricity from sunlight, solar panels lower household "
            "energy bills and reduce reliance on the grid.",
        ],
        "diverse": [
            "Photovoltaic technology was first developed in the nineteenth century.",
            "They are a good investment in many cases.",
            "Panels need regular cleaning to stay efficient, especially in dusty areas.",
            "It depends on the roof angle, the climate and local regulations.",
            "Many governments offer tax credits for installing renewable systems.",
            "Solar power is one of several renewable options available today.",
        ],
    },
    {
        "id": "sum-bikes",
        "task": "Summarization",
        "instruction": "Summarize the article.",
        "input": "Article: The city council approved a new bike lane network on Tuesday. The "
                 "plan adds forty kilometers of protected lanes over three years and is funded "
                 "by a regional transport grant. Local businesses raised concerns about parking.",
        "output": "The city council approved forty kilometers of protected bike lanes funded by "
                  "a regional grant, despite parking concerns from local businesses.",
        "fillers": {
            "Context": "Additional context: The vote took place at a regular council session.",
            "Planning": "Please generate the output based on the following outline: "
                        "1. the decision 2. funding 3. objections",
            "Style": "Write in a neutral news style.",
            "Theme": "expansion of cycling infrastructure",
        },
        "rewarded": ["Keywords", "Length", "Theme"],
        "close": [
            "The city council approved forty kilometers of protected bike lanes funded by a "
            "regional grant, despite parking concerns from local businesses.",
            "The council approved forty kilometers of protected bike lanes, funded by a "
            "regional grant, despite local business concerns about parking.",
            "Despite parking concerns from local businesses, the city council approved forty "
            "kilometers of protected bike lanes funded by a regional grant.",
        ],
        "diverse": [
            "A meeting happened on Tuesday.",
            "Cycling is becoming more popular in many cities around the world.",
            "Some people are unhappy about a new plan.",
            "The article is about transportation policy and urban planning debates.",
            "Three years is a long time for a construction project.",
            "Grants are an important source of funding for local governments.",
        ],
    },
    {
        "id": "story-cat",
        "task": "Story Composition",
        "instruction": "Write a short story based on the title.",
        "input": "Title: The Lighthouse Keeper's Cat",
        "output": "Every night the old keeper climbed the tower, and every night his grey cat "
                  "followed, until one stormy evening the cat's warning yowl saved a fishing "
                  "boat from the rocks.",
        "fillers": {
            "Context": "A lighthouse keeper tends the lamp alone on a rocky coast, with only "
                       "his cat for company.",
            "Planning": "1. the nightly routine 2. the storm 3. the rescue",
            "Style": "Write in a whimsical fairy-tale style.",
            "Theme": "Primarily discuss the following theme: loyalty between a man and his pet.",
        },
        "rewarded": ["Context", "Planning", "Style", "Theme"],
        "clarity_unchanged": ["Style"],
        "close": [
            "Every night the old keeper climbed the tower, and every night his grey cat "
            "followed, until one stormy evening the cat's warning yowl saved a fishing boat "
            "from the rocks.",
            "Each night the old keeper climbed the tower with his grey cat, until one stormy "
            "evening the cat's warning yowl saved a fishing boat from the rocks.",
            "Every night the keeper and his grey cat climbed the tower, and one stormy evening "
            "the cat's yowl saved a fishing boat from the rocks.",
        ],
        "diverse": [
            "Once upon a time there was a cat who loved fish more than anything.",
            "The lighthouse stood on a cliff for a hundred years.",
            "Mittens was a curious kitten who explored every corner of the island.",
            "The keeper retired and moved to the city, leaving the light dark.",
            "A storm was coming, and the sailors were afraid of the sea.",
            "She found the old logbook hidden under the spiral stairs.",
        ],
    },
    {
        "id": "title-ambig",
        "task": "Title Generation",
        "instruction": "Generate a title for the abstract.",
        "input": "Abstract: We study how unclear instructions affect text generation and "
                 "propose adding category-specific clarifications to those instructions.",
        "output": "Clarifying Underspecified Instructions for Better Text Generation",
        "fillers": {
            "Context": "The title is for a research paper in natural language processing.",
            "Planning": "1. the problem 2. the remedy",
            "Style": "academic",
            "Theme": "improving instruction clarity",
        },
        "rewarded": ["Keywords", "Length"],
        "close": [
            "Clarifying Underspecified Instructions for Better Text Generation",
            "Clarifying Underspecified Instructions for Text Generation",
            "Better Text Generation by Clarifying Underspecified Instructions",
        ],
        "diverse": [
            "A Study of Language Models",
            "On Prompts",
            "Neural Networks and Their Applications in Modern Computing",
            "What Do Users Really Want?",
            "Toward Robust Machine Learning Systems",
            "Ambiguity: A Survey",
        ],
    },
    {
        "id": "kw-coral",
        "task": "Keyword Tagging",
        "instruction": "Generate keywords for the paragraph.",
        "input": "Paragraph: Coral reefs are threatened by rising ocean temperatures, which "
                 "cause bleaching events and reduce biodiversity across tropical seas.",
        "output": "coral reef decline, ocean warming, coral bleaching, marine biodiversity loss",
        "fillers": {
            "Context": "Additional context: The keywords will index an environmental science "
                       "database.",
            "Planning": "1. cause 2. effect 3. consequence",
            "Style": "comma-separated list",
            "Theme": "climate impacts on marine ecosystems",
        },
        "rewarded": ["Context", "Keywords", "Length"],
        "close": [
            "coral reef decline, ocean warming, coral bleaching, marine biodiversity loss",
            "coral reef decline, ocean warming, bleaching, marine biodiversity loss",
            "ocean warming, coral bleaching, coral reef decline, marine biodiversity loss",
        ],
        "diverse": [
            "reefs, water",
            "environment",
            "tropical seas, fish, tourism, diving",
            "science, nature, ecology, planet, earth",
            "temperature",
            "climate, ocean",
        ],
    },
    {
        "id": "dlg-refund",
        "task": "Dialogue Generation",
        "instruction": "Continue the conversation.",
        "input": "Customer: My order arrived damaged and the box was crushed. Agent:",
        "output": "I'm sorry to hear that your order arrived damaged. I can arrange a free "
                  "replacement or a full refund, whichever you prefer.",
        "fillers": {
            "Context": "The store offers free replacements for items damaged in transit.",
            "Planning": "1. apologize 2. offer options",
            "Style": "polite customer-service",
            "Theme": "resolving a shipping complaint",
        },
        "rewarded": [],
        "close": [],
        "diverse": [
            "Please send us a photo of the damaged item.",
            "Thank you for contacting support.",
            "Can you tell me your order number?",
            "We apologize for the inconvenience caused by the courier.",
            "I will escalate this to my manager right away.",
            "Our returns policy is available on the website.",
        ],
    },
]

# Records that the NLG filter rejects.
REJECTED = [
    {"id": "math-sum", "task": "Arithmetic", "instruction": "List the first four counting numbers.",
     "input": "Start from one.", "output": "1 2 3 4"},
    {"id": "copy-span", "task": "Span Extraction", "instruction": "Copy the subject phrase.",
     "input": "Sentence: the quick brown fox jumps over the dog", "output": "the quick brown fox"},
    {"id": "yes-no", "task": "Answer Verification", "instruction": "Reply politely.",
     "input": "Did you finish the report?", "output": "yes sir"},
]

SUGGESTIONS = {
    "Context": [f"Additional context: {x}." for x in [
        "the reader is a beginner", "the text is for a school newsletter",
        "the audience is local residents", "assume no prior knowledge",
        "the output will be read aloud", "the setting is a small coastal town",
        "the answer is for a customer FAQ", "the reader is an expert",
        "the piece accompanies a photograph", "the output is for a press release"]],
    "Keywords": [f"Include {x} in your response." for x in [
        "renewable energy", "protected bike lanes", "grey cat", "text generation",
        "coral bleaching", "free replacement", "energy bills", "regional grant",
        "stormy evening", "marine biodiversity"]],
    "Length": [f"Answer with {x} words." for x in [
        "less than 10", "less than 20", "10 to 20", "20 to 30", "30 to 40",
        "40 to 50", "50 to 60", "less than 10", "10 to 20", "20 to 30"]],
    "Planning": [
        "Please generate the output based on the following outline: 1. background 2. main point",
        "Please generate the output based on the following outline: 1. problem 2. solution",
        "Please generate the output based on the following outline: 1. setting 2. conflict 3. resolution",
        "Please generate the output based on the following outline: 1. summary 2. details",
        "Please generate the output based on the following outline: 1. cause 2. effect",
        "Please generate the output based on the following outline: 1. question 2. answer",
        "Please generate the output based on the following outline: 1. claim 2. evidence",
        "Please generate the output based on the following outline: 1. apology 2. offer",
        "Please generate the output based on the following outline: 1. overview 2. outlook",
        "Please generate the output based on the following outline: 1. decision 2. reaction"],
    "Style": [f"Write in a {x} style." for x in [
        "formal", "casual", "persuasive", "neutral", "humorous", "poetic",
        "technical", "friendly", "concise", "narrative"]],
    "Theme": [f"Primarily discuss the following theme: {x}." for x in [
        "cost savings", "urban mobility", "loyalty", "research clarity", "ocean health",
        "customer care", "community impact", "bravery", "environmental change",
        "public policy"]],
}

TEMPLATE_DISPLAY = {
    "Context": "Additional context: ___",
    "Keywords": "Include ___ in your response.",
    "Length": "Answer with ___ words.",
    "Planning": "Please generate the output based on the following outline: ___",
    "Style": "Write in a ___ style.",
    "Theme": "Primarily discuss the following theme: ___.",
}

ANNOTATE_KINDS = {"Context": "AnnotateContext", "Planning": "AnnotatePlanning",
                  "Style": "AnnotateStyle", "Theme": "AnnotateTheme"}

ALIAS = {"Context": "Context", "Keywords": "Keyword", "Length": "Length",
         "Planning": "Plan", "Style": "Style", "Theme": "Theme"}


def scenario():
    rules = []
    for inst in INSTANCES:
        marker = inst["input"]
        for cat, kind in ANNOTATE_KINDS.items():
            rules.append({"kind": kind, "contains": [marker], "responses": [inst["fillers"][cat]]})
        for cat in inst.get("clarity_unchanged", []):
            rules.append({"kind": "ClarityJudge",
                          "contains": [marker, "# additional instruction:\n" +
                                       TEMPLATE_DISPLAY[cat].split("___")[0]],
                          "responses": ["Unchanged"]})
        rules.append({"kind": "Identify",
                      "contains": ["# Instruction:\n" + inst["instruction"] +
                                   "\n\n# Input text:\n" + marker + "\n\n# Response:\n"],
                      "responses": [", ".join(ALIAS[c] for c in inst["rewarded"]) or "None"]})
        # Generic clarification helps a little.
        rules.append({"contains": ["Below is an input text", marker, "Additional information:"],
                      "responses": (inst["close"][:1] + inst["diverse"][:3]) or inst["diverse"]})
        if inst["rewarded"]:
            rules.append({"contains": ["Below is an input text", marker,
                                       "# Instruction:\n" + inst["instruction"] + " "],
                          "contains_any": [CLAUSES[c] for c in inst["rewarded"]],
                          "responses": inst["close"]})
        rules.append({"contains": ["Below is an input text", marker],
                      "responses": inst["diverse"]})
    for cat, items in SUGGESTIONS.items():
        display = TEMPLATE_DISPLAY[cat]
        rules.append({"kind": "Suggest",
                      "contains": ["as a numbered list", "# Template to Infill:\n" + display],
                      "responses": ["\n".join(f"{i + 1}. {s}" for i, s in enumerate(items))]})
        rules.append({"kind": "Suggest", "contains": ["# Template to Infill:\n" + display],
                      "responses": items, "pick": "cycle"})
    rules += [
        {"kind": "ClarityJudge", "responses": ["Less ambiguous"]},
        {"kind": "Identify", "responses": ["Theme, Keyword"]},
        {"kind": "AnnotateContext", "responses": ["Additional context: none given."]},
        {"kind": "AnnotatePlanning", "responses": ["1. introduction 2. conclusion"]},
        {"kind": "AnnotateStyle", "responses": ["neutral"]},
        {"kind": "AnnotateTheme", "responses": ["the main topic"]},
        {"kind": "AnnotateGeneric",
         "responses": ["Additional information: Keep the response focused on the input."]},
    ]
    return {"rules": rules,
            "default_responses": ["Here is a direct response to the request."],
            "embedding": {"dim": 64}}


IDENTIFY_EVAL = [
    ("id-recipe", "Recipe Writing", "Write a recipe using the ingredients.",
     "Ingredients: eggs, spinach, feta", "Whisk eggs, wilt spinach, add feta and bake.",
     {"Length": ["less than 10"], "Style": ["step-by-step"]}),
    ("id-poem", "Poem Generation", "Write a poem about the topic.", "Topic: autumn rain",
     "Grey rain taps the amber leaves as the year turns slowly toward sleep.",
     {"Style": ["free verse"], "Theme": ["the passing of time"]}),
    ("id-email", "Email Writing", "Write an email based on the notes.",
     "Notes: meeting moved to Friday, bring slides",
     "Hi team, our meeting has moved to Friday. Please bring your slides.",
     {}),
    ("id-news", "Headline Generation", "Write a headline for the report.",
     "Report: Local library extends weekend hours after record visitor numbers.",
     "Library Extends Weekend Hours After Record Visits",
     {"Keywords": ["weekend hours"], "Length": ["less than 10"]}),
    ("id-faq", "Question Answering", "Answer the customer question.",
     "Question: Can I change my delivery address after ordering?",
     "Yes, you can change the delivery address from your account until the order ships.",
     {"Context": ["Addresses can be edited until dispatch."]}),
    ("id-plan", "Essay Writing", "Write a short essay on the topic.",
     "Topic: benefits of urban trees",
     "Urban trees cool streets, clean the air and make neighborhoods more pleasant to live in.",
     {"Planning": ["cooling", "air quality", "well-being"], "Theme": ["urban ecology"],
      "Keywords": ["urban trees"]}),
]

DEMOS = [
    ("demo-01", "Summarization", "Summarize the text.", "Text: The museum reopened after renovation.",
     {"Length": ["less than 10"]}),
    ("demo-02", "Story Composition", "Write a story from the prompt.", "Prompt: a lost robot",
     {"Theme": ["finding home"], "Style": ["whimsical"]}),
    ("demo-03", "Question Answering", "Answer the question.", "Question: Why is the sky blue?",
     {"Context": ["The reader is a child."]}),
    ("demo-04", "Email Writing", "Draft an email from the notes.", "Notes: invoice overdue",
     {"Style": ["polite"], "Keywords": ["invoice"]}),
    ("demo-05", "Poem Generation", "Write a poem about the subject.", "Subject: winter sea",
     {"Theme": ["solitude"]}),
    ("demo-06", "Headline Generation", "Write a headline.", "Report: Team wins regional final.",
     {"Length": ["less than 10"], "Keywords": ["regional final"]}),
    ("demo-07", "Essay Writing", "Write an essay on the topic.", "Topic: remote work",
     {"Planning": ["advantages", "drawbacks"]}),
    ("demo-08", "Recipe Writing", "Write a recipe.", "Ingredients: rice, beans",
     {"Length": ["10 to 20"]}),
    ("demo-09", "Translation", "Translate the sentence to French.", "Sentence: Good morning.",
     {}),
    ("demo-10", "Dialogue Generation", "Reply to the customer.", "Customer: Where is my parcel?",
     {"Context": ["The parcel is delayed by weather."]}),
]

RENDER = {
    "Context": lambda f: "Additional context: " + f[0],
    "Keywords": lambda f: "Include " + ", ".join(f) + " in your response.",
    "Length": lambda f: "Answer with " + f[0] + " words.",
    "Planning": lambda f: "Please generate the output based on the following outline: " +
                          " ".join(f"{i + 1}. {x}" for i, x in enumerate(f)),
    "Style": lambda f: "Write in a " + f[0] + " style.",
    "Theme": lambda f: "Primarily discuss the following theme: " + f[0] + ".",
}


def dataset_line(id_, task, instruction, input_, reference, anns):
    order = ["Context", "Keywords", "Length", "Planning", "Style", "Theme"]
    annotations = [{"category": c, "text": RENDER[c](anns[c]), "fillers": anns[c],
                    "source": "human"} for c in order if c in anns]
    return {"id": id_, "task": task, "instruction": instruction, "input": input_,
            "reference": reference, "annotations": annotations}


def identify_script(answer_for):
    rules = []
    for id_, task, instr, inp, ref, anns in IDENTIFY_EVAL:
        rules.append({"kind": "Identify",
                      "contains": ["# Instruction:\n" + instr + "\n\n# Input text:\n" + inp +
                                   "\n\n# Response:\n"],
                      "responses": [answer_for(anns)]})
    return {"rules": rules, "default_responses": ["None"]}


def gold_answer(anns):
    order = ["Length", "Keywords", "Context", "Theme", "Planning", "Style"]
    return ", ".join(ALIAS[c] for c in order if c in anns) or "None"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, ensure_ascii=False)
        f.write("\n")


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data", "mock")
    os.makedirs(out, exist_ok=True)
    raw = [{k: inst[k] for k in ("id", "task", "instruction", "input", "output")}
           for inst in INSTANCES]
    raw = raw[:3] + REJECTED[:1] + raw[3:5] + REJECTED[1:] + raw[5:]
    write_jsonl(os.path.join(out, "raw.jsonl"), raw)
    write_json(os.path.join(out, "scenario.json"), scenario())
    write_jsonl(os.path.join(out, "identify_eval.jsonl"),
                [dataset_line(*row) for row in IDENTIFY_EVAL])
    write_jsonl(os.path.join(out, "demos.jsonl"),
                [dataset_line(i, t, ins, inp, "", a) for i, t, ins, inp, a in DEMOS])
    write_json(os.path.join(out, "oracle.json"), identify_script(gold_answer))
    write_json(os.path.join(out, "all_positive.json"),
               identify_script(lambda a: "Length, Keyword, Context, Theme, Plan, Style"))
    write_json(os.path.join(out, "always_none.json"), identify_script(lambda a: "None"))
    write_json(os.path.join(out, "config.json"), {
        "provider": "mock",
        "mock_script": "scenario.json",
        "cache_dir": "",
        "sessions_dir": "sessions",
        "num_samples": 20,
        "parallelism": 4,
        "demo_pool": "demos.jsonl",
    })


if __name__ == "__main__":
    main()
