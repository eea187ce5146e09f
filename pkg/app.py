from pathlib import Path

import streamlit as st
from dotenv import load_dotenv

load_dotenv()

# Import custom components
from components.sidebar import render_sidebar
from components.charts import render_pseudospectrum, render_quasimode
from components.analytics import render_weyl_statistics, render_resolvent_table
from config import APP_CONFIG, DEFAULT_OUTPUT_DIR
from utils.database import RunRegistry
from utils.logger import setup_logging

# Page configuration
st.set_page_config(
    page_title=f"{APP_CONFIG['name']} {APP_CONFIG['logo']}",
    page_icon="∿",
    layout="wide",
    initial_sidebar_state="expanded"
)


# Load custom CSS
def load_css():
    css_file = Path("assets/styles.css")
    if css_file.exists():
        with open(css_file) as f:
            st.markdown(f"<style>{f.read()}</style>", unsafe_allow_html=True)


def main():
    setup_logging()
    load_css()

    # Header with branding
    col1, col2, col3 = st.columns([1, 3, 1])
    with col2:
        st.markdown(f"""
        <div class="main-header">
            <h1>{APP_CONFIG['logo']} {APP_CONFIG['name']}</h1>
            <p class="subtitle">{APP_CONFIG['tagline']}</p>
            <p class="version">v{APP_CONFIG['version']} - {APP_CONFIG['description']}</p>
        </div>
        """, unsafe_allow_html=True)

    with st.sidebar:
        params = render_sidebar()

    tab1, tab2, tab3, tab4 = st.tabs([
        "🗺️ Pseudospectrum", "〰️ Quasimode", "🎲 Weyl Law", "📈 Resolvent"
    ])

    with tab1:
        render_pseudospectrum(params)

    with tab2:
        render_quasimode(params)

    with tab3:
        render_weyl_statistics(params)

    with tab4:
        render_resolvent_table()

    render_run_history()


def render_run_history():
    """Recent CLI runs from the registry"""
    db_path = Path(DEFAULT_OUTPUT_DIR) / "speclab_runs.db"
    if not db_path.exists():
        return
    with st.expander("🗂️ Recent CLI runs"):
        st.dataframe(RunRegistry(db_path).list_runs(limit=20), use_container_width=True)


if __name__ == "__main__":
    main()
