# python/wsw/__init__.py

# Copyright 2026  The wsw Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Machine vs expert classroom transcript analysis."""

from ._core import (
    AlignConfig,
    AlignedCorpus,
    AlignedPair,
    ConfusionMatrix,
    RecordingMeta,
    Transcript,
    Utterance,
    WswError,
    accuracy,
    align,
    align_by_index,
    align_by_time,
    cohen_kappa,
    cross_classify,
    detect_responses,
    icc_absolute,
    is_question,
    levenshtein,
    load_expert,
    load_machine,
    load_meta,
    normalize,
    reliability,
    response_proportion,
    run_batch,
    summarize,
    time_weighted_mean,
    tokenize,
    utterance_wer,
    validate,
    weighted_f1,
)

__version__ = "0.1.0"
