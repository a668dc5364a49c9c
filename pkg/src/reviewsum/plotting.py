"""Report figures written next to the delimited report files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    # no Software/date metadata so identical inputs give identical files
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_k_sweep(report, path, title="Topic count sweep"):
    """Held-out perplexity and training log-likelihood against K."""
    ks = [c[0] for c in report.candidates]
    ll = [c[1] for c in report.candidates]
    pp = [c[2] for c in report.candidates]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        ax.plot(ks, pp, "o-", color="tab:blue", label="held-out perplexity")
        ax.set_xlabel("number of topics K")
        ax.set_ylabel("perplexity", color="tab:blue")
        if report.chosen_K is not None:
            ax.axvline(report.chosen_K, color="0.5", ls="--", lw=0.8)
        ax2 = ax.twinx()
        ax2.spines["right"].set_visible(True)
        ax2.plot(ks, ll, "s:", color="tab:red", ms=3, label="train log-likelihood")
        ax2.set_ylabel("log-likelihood", color="tab:red")
        ax.set_title(f"{title} (chosen K = {report.chosen_K})")
        _save(fig, path)


def plot_rouge(report, path):
    """Per-product F1 distribution for each ROUGE variant, macro mean marked."""
    variants = list(report.macro_average)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, len(variants), figsize=(3.0 * len(variants), 2.6), squeeze=False)
        for ax, v in zip(axes[0], variants):
            f1 = [scores[v].f1 for scores in report.per_product.values()]
            ax.hist(f1, bins=min(20, max(5, len(f1))), range=(0, 1), color="0.6", edgecolor="white")
            ax.axvline(report.macro_average[v].f1, color="tab:red", lw=1)
            ax.set_xlabel(f"{v} F1")
            ax.set_title(f"mean {report.macro_average[v].f1:.3f}")
        axes[0][0].set_ylabel("products")
        _save(fig, path)


def plot_topic_sizes(counts, path, title="Sentences per topic"):
    """Bar chart of sentence counts per topic (salience)."""
    topics = sorted(counts)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 2.6))
        ax.bar([str(t) for t in topics], [counts[t] for t in topics], color="0.5")
        ax.set_xlabel("topic")
        ax.set_ylabel("sentences")
        ax.set_title(title)
        _save(fig, path)
