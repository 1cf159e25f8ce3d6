import shutil
import sqlite3
from pathlib import Path

import pytest

from codemine.crawler import crawl_pass
from codemine.store import StoreHandle

from corpusgen import Corpus, build_corpus


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> Corpus:
    root = tmp_path_factory.mktemp("corpus")
    return build_corpus(root / "repos")


@pytest.fixture(scope="session")
def session_store(corpus, tmp_path_factory):
    """Store holding one pristine crawl of the full corpus (read-only use)."""
    base = tmp_path_factory.mktemp("store")
    store_path = base / "corpus.db"
    store = StoreHandle(store_path)
    summary = crawl_pass(str(corpus.manifest_path), store, base, pool_size=8)
    assert summary.failures == []
    assert summary.new_repos == len(corpus.repos)
    return store


@pytest.fixture()
def store_path_of(session_store):
    return Path(session_store.path)


def copy_store(src_path: str | Path, dst_path: str | Path) -> StoreHandle:
    """Consistent store copy via the sqlite backup API."""
    src = sqlite3.connect(str(src_path))
    dst = sqlite3.connect(str(dst_path))
    with dst:
        src.backup(dst)
    src.close()
    dst.close()
    return StoreHandle(dst_path)


@pytest.fixture()
def store_copy(session_store, tmp_path):
    """Private mutable copy of the session store."""
    return copy_store(session_store.path, tmp_path / "copy.db")
