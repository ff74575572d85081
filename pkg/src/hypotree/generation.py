"""Prompt assembly, provider transport, and response parsing.

The two prompt templates (initial 5-wide generation and 3-wide branch
generation) are frozen verbatim below; assembly is byte-deterministic and
golden-tested. Responses are JSON arrays in two shapes that normalize into
one HypothesisDraft type: the initial shape carries its title inside the
leading [brackets] of the hypothesis string, the branch shape has an explicit
title field plus relatedWork.

Providers are pluggable: "remote" speaks a chat-completion style HTTP API,
"mock" returns deterministic fixture responses seeded from a hash of the
prompt so the whole stack runs offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import time
from dataclasses import dataclass

import httpx

from .errors import (
    AuthMissing,
    MalformedResponse,
    ProviderTimeout,
    ProviderUnavailable,
    RootNotBranchablePromptless,
    WrongCardinality,
)
from .model import HypothesisNode

INITIAL_COUNT = 5
BRANCH_COUNT = 3

DEFAULT_PERSONA = "data analyst"

SYSTEM_INSTRUCTIONS = (
    "You are an experienced data analyst who can generate a given number of "
    "insightful Hypothesis about data, when given a summary of the data, and "
    "a specified persona. The VISUALIZATIONS YOU RECOMMEND MUST FOLLOW "
    "VISUALIZATION BEST PRACTICES (e.g., must use bar charts instead of pie "
    "charts for comparing quantities) AND BE MEANINGFUL (e.g., plot longitude "
    "and latitude on maps where appropriate). They must also be relevant to "
    "the specified persona. Each goal must include a hypothesis with a title "
    "(in [], and the title don't need include the target variable, just "
    "include the new variable in the hypothesis), a visualization (THE "
    "VISUALIZATION MUST REFERENCE THE EXACT COLUMN FIELDS FROM THE SUMMARY), "
    "and a rationale (JUSTIFICATION FOR WHICH dataset FIELDS ARE USED and "
    "what we will learn from the visualization)."
)

USER_PROMPT_TEMPLATE = (
    "The number of Hypothesis to generate is {n}. The goals should be based "
    "on the data summary below, {data_summary}. The generated Hypothesis "
    "SHOULD BE FOCUSED ON THE INTERESTS AND PERSPECTIVE of a {persona} "
    "persona, who is interested in complex, insightful goals about the data."
)

FORMAT_INSTRUCTIONS = (
    "THE OUTPUT MUST BE A CODE SNIPPET OF A VALID LIST OF JSON OBJECTS. "
    "IT MUST USE THE FOLLOWING FORMAT:\n"
    "[\n"
    '    { "index": 0,  "hypothesis": "[new variable X]: Y is highly '
    'correlated to X.", "visualization": "scatterplot of X and Y", '
    '"rationale": "This tells about "} ..\n'
    "]\n"
    "THE OUTPUT SHOULD ONLY USE THE JSON FORMAT ABOVE."
)

BRANCH_USER_TEMPLATE = (
    "Based on the hypothesis {hypothesis}{user_input_clause}, generate 3 new "
    "and more insightful hypotheses based on the given hypothesis."
)

BRANCH_FORMAT_INSTRUCTIONS = (
    "Format the output as a JSON array with the following structure for each "
    "hypothesis:\n"
    "{\n"
    '  "title": "short new variable X (no more than two words)",\n'
    '  "hypothesis": "There is a...",\n'
    '  "relatedWork": "Previous studies have shown that...",\n'
    '  "visualization": "Description of visualization idea",\n'
    '  "rationale": "Rationale for the visualization"\n'
    "}"
)


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    format_text: str
    assembled: str
    n: int
    persona: str


@dataclass(frozen=True)
class HypothesisDraft:
    title: str
    hypothesis_text: str
    visualization_idea: str
    rationale: str
    related_work: str = ""
    source_kind: str = "initial"  # initial | branch


@dataclass
class ProviderConfig:
    mode: str = "mock"  # mock | remote
    endpoint_url: str | None = None
    api_key_env_name: str | None = None
    model_name: str = "gpt-4o"
    timeout: float = 30.0
    max_retries: int = 2
    response_path: str = "choices.0.message.content"

    def validate(self) -> None:
        if self.mode not in ("mock", "remote"):
            raise ValueError(f"unknown provider mode: {self.mode}")
        if self.mode == "remote" and not (self.endpoint_url and self.api_key_env_name):
            raise ValueError("remote mode requires endpoint_url and api_key_env_name")


def build_initial_prompt(
    summary_text: str, persona: str = DEFAULT_PERSONA, n: int = INITIAL_COUNT
) -> PromptBundle:
    """Assemble the 5-hypothesis generation prompt for a dataset summary."""
    if not summary_text:
        raise ValueError("summary_text must be non-empty")
    user_text = USER_PROMPT_TEMPLATE.format(
        n=n, data_summary=summary_text, persona=persona
    )
    assembled = (
        f"{user_text}\n\n {FORMAT_INSTRUCTIONS} \n\n. The generated {n} goals are: \n "
    )
    return PromptBundle(
        system_text=SYSTEM_INSTRUCTIONS,
        user_text=user_text,
        format_text=FORMAT_INSTRUCTIONS,
        assembled=assembled,
        n=n,
        persona=persona,
    )


def build_branch_prompt(
    selected: HypothesisNode, user_input: str | None = None
) -> PromptBundle:
    """Assemble the 3-hypothesis branch prompt for a selected node.

    The "and the user input ..." clause is omitted entirely when no steering
    text was supplied.
    """
    if selected.is_root:
        raise RootNotBranchablePromptless()
    clause = f" and the user input {user_input}" if user_input else ""
    user_text = BRANCH_USER_TEMPLATE.format(
        hypothesis=selected.hypothesis_text, user_input_clause=clause
    )
    assembled = f"{user_text} {BRANCH_FORMAT_INSTRUCTIONS}"
    return PromptBundle(
        system_text="",
        user_text=user_text,
        format_text=BRANCH_FORMAT_INSTRUCTIONS,
        assembled=assembled,
        n=BRANCH_COUNT,
        persona="",
    )


# --- response parsing --------------------------------------------------------

_FENCE_RE = re.compile(r"^```[a-zA-Z0-9_-]*\s*\n(.*?)\n?```\s*$", re.DOTALL)


def strip_code_fences(raw: str) -> str:
    text = raw.strip()
    match = _FENCE_RE.match(text)
    return match.group(1) if match else text


def _load_array(raw: str) -> list:
    try:
        data = json.loads(strip_code_fences(raw))
    except (json.JSONDecodeError, RecursionError) as exc:
        raise MalformedResponse(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise MalformedResponse(f"expected a JSON array, got {type(data).__name__}")
    return data


def _require_str(element: dict, key: str, position: int) -> str:
    if key not in element:
        raise MalformedResponse(f"element {position} is missing key {key!r}")
    value = element[key]
    if not isinstance(value, str):
        raise MalformedResponse(f"element {position} key {key!r} is not a string")
    return value


def _title_from_hypothesis(hypothesis: str) -> str:
    if hypothesis.startswith("["):
        closing = hypothesis.find("]")
        if closing > 0:
            inner = hypothesis[1:closing].strip()
            if inner:
                return inner
    return " ".join(hypothesis.split()[:4])


def parse_initial_response(raw: str) -> list[HypothesisDraft]:
    """Parse the 5-element initial-generation array, sorted by index.

    Titles are recovered from the leading [brackets] of the hypothesis string,
    falling back to its first 4 words.
    """
    data = _load_array(raw)
    if len(data) != INITIAL_COUNT:
        raise WrongCardinality(INITIAL_COUNT, len(data))
    elements = []
    for pos, element in enumerate(data):
        if not isinstance(element, dict):
            raise MalformedResponse(f"element {pos} is not an object")
        if "index" not in element:
            raise MalformedResponse(f"element {pos} is missing key 'index'")
        if not isinstance(element["index"], int) or isinstance(element["index"], bool):
            raise MalformedResponse(f"element {pos} key 'index' is not an integer")
        hypothesis = _require_str(element, "hypothesis", pos)
        if not hypothesis.strip():
            raise MalformedResponse(f"element {pos} has an empty hypothesis")
        elements.append(
            (
                element["index"],
                HypothesisDraft(
                    title=_title_from_hypothesis(hypothesis),
                    hypothesis_text=hypothesis,
                    visualization_idea=_require_str(element, "visualization", pos),
                    rationale=_require_str(element, "rationale", pos),
                    related_work="",
                    source_kind="initial",
                ),
            )
        )
    elements.sort(key=lambda pair: pair[0])
    return [draft for _, draft in elements]


def parse_branch_response(raw: str) -> list[HypothesisDraft]:
    """Parse the 3-element branch array; relatedWork is preserved."""
    data = _load_array(raw)
    if len(data) != BRANCH_COUNT:
        raise WrongCardinality(BRANCH_COUNT, len(data))
    drafts = []
    for pos, element in enumerate(data):
        if not isinstance(element, dict):
            raise MalformedResponse(f"element {pos} is not an object")
        hypothesis = _require_str(element, "hypothesis", pos)
        if not hypothesis.strip():
            raise MalformedResponse(f"element {pos} has an empty hypothesis")
        title = _require_str(element, "title", pos)
        if not title.strip():
            title = " ".join(hypothesis.split()[:4])
        drafts.append(
            HypothesisDraft(
                title=title,
                hypothesis_text=hypothesis,
                visualization_idea=_require_str(element, "visualization", pos),
                rationale=_require_str(element, "rationale", pos),
                related_work=_require_str(element, "relatedWork", pos),
                source_kind="branch",
            )
        )
    return drafts


# --- provider transport ------------------------------------------------------


def generate(provider: ProviderConfig, bundle: PromptBundle) -> str:
    """Return the provider's raw text for an assembled prompt."""
    provider.validate()
    if provider.mode == "mock":
        return mock_response(bundle)
    return remote_completion(
        provider, bundle.system_text, bundle.assembled, role="assistant"
    )


def remote_completion(
    provider: ProviderConfig, system_text: str, content: str, role: str = "user"
) -> str:
    """POST a two-message chat-completion request and extract the text.

    Transient transport failures retry with exponential backoff up to
    max_retries; the API key is read from the configured environment variable
    and never logged.
    """
    assert provider.api_key_env_name and provider.endpoint_url
    api_key = os.environ.get(provider.api_key_env_name)
    if not api_key:
        raise AuthMissing(provider.api_key_env_name)

    request_body = {
        "model": provider.model_name,
        "messages": [
            {"role": "system", "content": system_text},
            {"role": role, "content": content},
        ],
    }
    headers = {"Authorization": f"Bearer {api_key}"}

    last_error: Exception | None = None
    timed_out = False
    for attempt in range(provider.max_retries + 1):
        if attempt:
            time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
        try:
            response = httpx.post(
                provider.endpoint_url,
                json=request_body,
                headers=headers,
                timeout=provider.timeout,
            )
        except httpx.TimeoutException as exc:
            last_error, timed_out = exc, True
            continue
        except httpx.TransportError as exc:
            last_error, timed_out = exc, False
            continue
        if response.status_code >= 500:
            last_error, timed_out = (
                ProviderUnavailable(f"HTTP {response.status_code}"),
                False,
            )
            continue
        if response.status_code >= 400:
            raise ProviderUnavailable(f"HTTP {response.status_code}")
        return _extract_by_path(response.json(), provider.response_path)

    if timed_out:
        raise ProviderTimeout(str(last_error))
    raise ProviderUnavailable(str(last_error))


def _extract_by_path(payload: object, path: str) -> str:
    cursor = payload
    for segment in path.split("."):
        if isinstance(cursor, list) and segment.lstrip("-").isdigit():
            try:
                cursor = cursor[int(segment)]
            except IndexError:
                raise MalformedResponse(f"response path {path!r} out of range") from None
        elif isinstance(cursor, dict) and segment in cursor:
            cursor = cursor[segment]
        else:
            raise MalformedResponse(f"response path {path!r} not found")
    if not isinstance(cursor, str):
        raise MalformedResponse(f"response path {path!r} is not text")
    return cursor


# --- deterministic mock provider ----------------------------------------------

_SUMMARY_COLUMN_RE = re.compile(
    r"^- (.+?) \((?:numeric|categorical|boolean|datetime|text)\)", re.MULTILINE
)

_FALLBACK_VARIABLES = (
    "education level",
    "work hours",
    "marital status",
    "occupation",
    "age group",
    "capital gains",
    "institution prestige",
    "family wealth",
    "regional cost",
    "employment sector",
)

_CHART_PHRASES = (
    "scatterplot of {x} and {y}",
    "bar chart of {y} by {x}",
    "line chart of {y} over {x}",
    "box plot of {y} by {x}",
    "histogram of {x}",
)


def mock_response(bundle: PromptBundle) -> str:
    """Deterministic fixture response seeded from a hash of the prompt.

    Initial bundles (n=5) yield the index/hypothesis shape; branch bundles
    (n=3) yield the titled shape with relatedWork. Visualization ideas reuse
    column names parsed back out of the embedded data summary so downstream
    chart derivation has real fields to bind to.
    """
    seed = int.from_bytes(
        hashlib.sha256(bundle.assembled.encode("utf-8")).digest()[:8], "big"
    )
    rng = random.Random(seed)
    columns = _SUMMARY_COLUMN_RE.findall(bundle.user_text)
    variables = columns if len(columns) >= 2 else list(_FALLBACK_VARIABLES)

    if bundle.n == INITIAL_COUNT:
        body = _mock_initial(rng, variables)
    else:
        body = _mock_branch(rng, variables)
    return "```json\n" + json.dumps(body, indent=2) + "\n```"


def _pick_pair(rng: random.Random, variables: list[str]) -> tuple[str, str]:
    x = rng.choice(variables)
    y = rng.choice([v for v in variables if v != x] or variables)
    return x, y


def _mock_initial(rng: random.Random, variables: list[str]) -> list[dict]:
    out = []
    for i in range(INITIAL_COUNT):
        x, y = _pick_pair(rng, variables)
        chart = rng.choice(_CHART_PHRASES).format(x=x, y=y)
        out.append(
            {
                "index": i,
                "hypothesis": f"[{x.title()}]: {y} is highly correlated to {x}.",
                "visualization": chart,
                "rationale": (
                    f"Comparing {x} against {y} shows whether the relationship "
                    "holds across the dataset."
                ),
            }
        )
    return out


def _mock_branch(rng: random.Random, variables: list[str]) -> list[dict]:
    out = []
    for _ in range(BRANCH_COUNT):
        x, y = _pick_pair(rng, variables)
        chart = rng.choice(_CHART_PHRASES).format(x=x, y=y)
        title_words = x.split()[:2]
        out.append(
            {
                "title": " ".join(w.title() for w in title_words),
                "hypothesis": f"There is a positive association between {x} and {y}.",
                "relatedWork": (
                    f"Previous studies have shown that {x} interacts with {y}."
                ),
                "visualization": chart,
                "rationale": (
                    f"Plotting {x} against {y} isolates the association the "
                    "hypothesis claims."
                ),
            }
        )
    return out
