import numpy as np
import plotly.express as px
import streamlit as st

from config import CLI_DEFAULTS, PERFORMANCE_CONFIG


@st.cache_data(ttl=PERFORMANCE_CONFIG["cache_ttl"])
def compute_weyl(weyl_tree, seed):
    from spectral.random_weyl import ExperimentConfig, run_weyl_experiment

    result = run_weyl_experiment(ExperimentConfig.from_config(weyl_tree, seed))
    return result.frame, result.summary


@st.cache_data(ttl=PERFORMANCE_CONFIG["cache_ttl"])
def compute_resolvent(n, lambdas, mus):
    from spectral.oscillator import build_rotated_oscillator, resolvent_scan

    return resolvent_scan(build_rotated_oscillator(n), lambdas, mus)


def render_weyl_statistics(params):
    """Monte-Carlo eigenvalue counts against the Weyl prediction"""
    st.subheader("🎲 Weyl Law Monte Carlo")
    if not st.button("Run experiment", type="primary"):
        st.info("Choose trials and h in the sidebar, then run the experiment")
        return
    try:
        with st.spinner("Sampling perturbations..."):
            frame, summary = compute_weyl(params["weyl"], params["seed"])
    except Exception as e:
        st.error(f"Experiment failed: {str(e)}")
        return

    prediction = float(frame["prediction"].iloc[0])
    fig = px.histogram(frame, x="count", nbins=20, title="Eigenvalue counts in Γ")
    fig.add_vline(x=prediction, line_dash="dash", annotation_text="Weyl prediction")
    fig.update_layout(height=380)
    st.plotly_chart(fig, use_container_width=True)

    col1, col2, col3 = st.columns(3)
    col1.metric("Prediction", f"{prediction:.1f}")
    col2.metric("Mean count", f"{frame['count'].mean():.1f}")
    col3.metric("Median rel. deviation", f"{summary['median_relative_deviation'].iloc[0]:.1%}")
    st.dataframe(frame, use_container_width=True)


def render_resolvent_table():
    """Rotated oscillator resolvent norms along E = iλ + μ"""
    st.subheader("📈 Boundary Resolvent")
    defaults = CLI_DEFAULTS["resolvent-scan"]
    n = st.select_slider("Hermite modes n", options=[256, 384, 512], value=defaults["n"])
    try:
        frame = compute_resolvent(n, tuple(defaults["lambdas"]), tuple(defaults["mus"]))
    except Exception as e:
        st.error(f"Scan failed: {str(e)}")
        return
    frame = frame.assign(log10_norm=np.log10(frame["norm"]))
    fig = px.line(frame, x="mu", y="log10_norm", color="lambda", markers=True,
                  title="log10 ‖(Q − E)⁻¹‖")
    st.plotly_chart(fig, use_container_width=True)
    st.dataframe(frame, use_container_width=True)
