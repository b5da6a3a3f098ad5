# Copyright 2026 The medex Authors.
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

"""Main event (5W1H) extraction from news articles.

Example:

    import medex
    ex = medex.Extractor(geocoder_cache="geocoder_cache.jsonl")
    result = ex.extract_file("article.med.json")
    print(result["questions"]["where"]["answer"]["canonical"])
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Mapping

from . import _medex
from ._medex import (
    AllOovError,
    ArityError,
    ConfigError,
    DegenerateDocument,
    Embeddings,
    InvariantViolation,
    IoError,
    MedexError,
    NetworkError,
    ProtocolError,
    RangeError,
    SchemaError,
)

__all__ = [
    "AllOovError", "ArityError", "ConfigError", "DegenerateDocument", "Embeddings",
    "Extractor", "InvariantViolation", "IoError", "MedexError", "NetworkError",
    "ProtocolError", "RangeError", "SchemaError", "QUESTIONS", "default_config",
    "icr", "learn", "magp",
]

QUESTIONS = ("who", "what", "when", "where", "why", "how")


def _as_text(doc: str | Mapping[str, Any]) -> str:
    return doc if isinstance(doc, str) else json.dumps(doc)


class Extractor:
    """Runs the extraction pipeline with one fixed configuration.

    config may be config text or a path to a config file. Without a
    geocoder (cache or URL) no WHERE candidates are produced.
    """

    def __init__(self, *, config: str | os.PathLike | None = None,
                 geocoder_cache: str | os.PathLike | None = None,
                 geocoder_url: str | None = None, nlp_server: str | None = None,
                 top_k: int = 5, threshold_why: float | None = None,
                 threshold_how: float | None = None) -> None:
        config_text = None
        if config is not None:
            config_text = str(config)
            if os.path.exists(config_text):
                with open(config_text, encoding="utf-8") as f:
                    config_text = f.read()
        self._core = _medex.Extractor(
            config_text=config_text,
            geocoder_cache=None if geocoder_cache is None else os.fspath(geocoder_cache),
            geocoder_url=geocoder_url or os.environ.get("MED_GEOCODER_URL") or None,
            nlp_server=nlp_server or os.environ.get("MED_NLP_SERVER") or None,
            top_k=top_k, threshold_why=threshold_why, threshold_how=threshold_how)

    def extract_json(self, document: str | Mapping[str, Any]) -> str:
        """Result JSON text for a pre-annotated document, as the CLI prints it."""
        return self._core.extract_annotated(_as_text(document))

    def extract(self, document: str | Mapping[str, Any]) -> dict:
        return json.loads(self.extract_json(document))

    def extract_file(self, path: str | os.PathLike) -> dict:
        with open(path, encoding="utf-8") as f:
            return self.extract(f.read())

    def extract_article(self, article: str | Mapping[str, Any]) -> dict:
        """Annotates {title, lead?, body, date?} with the annotation server first."""
        return json.loads(self._core.extract_article(_as_text(article)))

    @property
    def config(self) -> str:
        return self._core.config_text()


def default_config() -> str:
    return _medex.default_config_text()


def magp(assessments: Iterable[Mapping[str, Any]], group_by: str = "question") -> dict:
    """assessments: dicts with article, question, grade and optional category."""
    rows = [(a["article"], a["question"], float(a["grade"]), a.get("category", ""))
            for a in assessments]
    return json.loads(_medex.magp(rows, group_by))


def icr(annotations: Mapping[str, Mapping[tuple[str, str], str]]) -> float:
    """annotations: annotator -> {(article, question): phrase}."""
    return _medex.icr({k: dict(v) for k, v in annotations.items()})


def learn(dataset: str | os.PathLike, embeddings: str | os.PathLike, *,
          extractor: Extractor | None = None, seed: int = 0, train_fraction: float = 0.8,
          grid_step: float = 0.05) -> dict:
    """Grid-searches weights; the result holds the learned "config" text."""
    ex = extractor or Extractor()
    return json.loads(_medex.learn(os.fspath(dataset), os.fspath(embeddings), ex._core,
                                   seed, train_fraction, grid_step))
