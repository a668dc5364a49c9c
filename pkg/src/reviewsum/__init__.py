"""Extractive summarization of customer reviews.

Reviews are split into sentences, sentences sharing a noun are pooled into
documents for LDA, and each product's summary takes the best sentence from
each of its most populated topics, ranked by
``(topic probability + opinion score) * summary likelihood``.
"""

from .corpus import CorpusStats, Dataset, ProductRecord, dataset_stats, load_dataset
from .evalrouge import EvalReport, RougeScore, evaluate_corpus, rouge_l, rouge_n
from .porter import porter_stem
from .preprocess import (
    CombinedDoc,
    Preprocessor,
    SentenceRecord,
    build_combined_docs,
    normalize_and_filter,
    split_sentences,
    tag_nouns,
)
from .sentiment import SentimentLexicon, SentimentScores, polarity_label, score_sentence
from .style import StyleModel, summary_likelihood, train_style_model
from .summarize import (
    ProductSummary,
    generate_summary,
    select_salient_topics,
    sentence_score,
    topic_polarity_and_op,
)
from .topics import (
    KSelectionReport,
    LdaModel,
    TopicAssignment,
    infer_sentence_topics,
    perplexity,
    select_k,
    train_lda,
)

__version__ = "0.1.0"
