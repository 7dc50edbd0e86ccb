import sys
import os
from PyQt5.QtWidgets import (
    QApplication,
    QWidget,
    QVBoxLayout,
    QHBoxLayout,
    QPushButton,
    QLineEdit,
    QCheckBox,
    QMessageBox,
)
from PyQt5.QtCore import Qt, QPoint
from src.assets.catalog import MembershipChecker
from src.assets.config import create_toolkit_config, setup_default_logger
from src.assets.errors import SemigroupToolkitError
from src.assets.groupoid import format_egg_box, load_groupoid_safe
from src.uiitems.egg_box_view import EggBoxView
from src.uiitems.table_file_input import TableFileInput

BUTTON_STYLE = """
    QPushButton {
        background-color: #CDEBF0;
        color: black;
        font-weight: bold;
        border-radius: 8px;
        padding: 10px;
        margin: 10px;
    }
    QPushButton:hover {
        background-color: #BEE0E8;
    }
"""

CHECKBOX_STYLE = """
    QCheckBox {
        background-color: #CDEBF0;
        color: black;
        font-weight: bold;
        padding: 10px;
        margin: 5px;
        border-radius: 8px;
        border: 2px solid #BEE0E8;
    }
    QCheckBox:hover {
        background-color: #BEE0E8;
    }
    QCheckBox::indicator:checked {
        background-color: #4A90E2;
        border: 2px solid #4A90E2;
    }
"""


def get_resource_path(relative_path):
    """Get absolute path to resource, works for dev and for PyInstaller"""
    try:
        # PyInstaller unpacks bundled data into _MEIPASS
        base_path = sys._MEIPASS
    except Exception:
        base_path = os.path.abspath(".")

    return os.path.join(base_path, relative_path)


class MainWorkflowApp(QWidget):
    def __init__(self):
        super().__init__()
        self.packed_format = False
        self.lenient = False
        self.logger = setup_default_logger("src.gui")
        self.init_ui()
        self.setMouseTracking(True)
        self.oldPos = self.pos()

    def init_ui(self):
        """Build the window: table picker, variety field, options and preview."""
        self.setWindowFlags(Qt.FramelessWindowHint | Qt.WindowStaysOnTopHint)
        self.setAttribute(Qt.WA_TranslucentBackground)
        self.setObjectName("App")
        self.setStyleSheet(
            """
            QWidget {
                font-family: 'Arial';
                background-color: transparent;
                border: 2px solid #CDEBF0;
                border-radius: 20px;
            }
        """
        )

        self.mainLayout = QVBoxLayout(self)
        self.mainLayout.setContentsMargins(5, 5, 5, 5)
        self.mainLayout.setSpacing(10)
        self.mainLayout.addLayout(self.create_title_bar())

        self.table_input = TableFileInput(
            self, initial_dir=get_resource_path(os.path.join("static", "tables"))
        )
        self.mainLayout.addWidget(self.table_input)

        self.variety_input = self.create_line_edit(
            "Variety expression, e.g. A, D(A), K@D(A), EA"
        )
        self.mainLayout.addWidget(self.variety_input)

        checkbox_layout = QHBoxLayout()
        self.packed_checkbox = QCheckBox("Packed format", self)
        self.packed_checkbox.setStyleSheet(CHECKBOX_STYLE)
        self.packed_checkbox.stateChanged.connect(self.toggle_packed_format)
        checkbox_layout.addWidget(self.packed_checkbox)

        self.lenient_checkbox = QCheckBox("Lenient mode", self)
        self.lenient_checkbox.setStyleSheet(CHECKBOX_STYLE)
        self.lenient_checkbox.stateChanged.connect(self.toggle_lenient)
        checkbox_layout.addWidget(self.lenient_checkbox)
        self.mainLayout.addLayout(checkbox_layout)

        self.start_button = self.create_button(
            "Start Checking", self.run_membership_workflow
        )
        self.mainLayout.addWidget(self.start_button)

        self.preview = EggBoxView(self)
        self.mainLayout.addWidget(self.preview)

        self.setLayout(self.mainLayout)
        self.resize(640, 720)

    def create_button(self, text, slot, style=None):
        button = QPushButton(text, self)
        button.clicked.connect(slot)
        button.setStyleSheet(style if style else BUTTON_STYLE)
        return button

    def create_line_edit(self, placeholder, style=None):
        line_edit = QLineEdit(self)
        line_edit.setPlaceholderText(placeholder)
        line_edit.setStyleSheet(
            style
            if style
            else """
            QLineEdit {
                border: 2px solid #ccc;
                border-radius: 8px;
                padding: 8px;
                margin: 10px;
                color: black;
                background-color: white;
            }
        """
        )
        return line_edit

    def create_title_bar(self):
        title_bar = QHBoxLayout()
        close_button = QPushButton("X", self)
        close_button.setStyleSheet(
            "QPushButton { color: black; font-weight: bold; border: none;"
            " padding: 5px 10px; margin-right: 10px; background-color: white; }"
        )
        close_button.clicked.connect(self.close)
        title_bar.addWidget(close_button, alignment=Qt.AlignRight)
        return title_bar

    def toggle_packed_format(self, state):
        self.packed_format = state == Qt.Checked

    def toggle_lenient(self, state):
        self.lenient = state == Qt.Checked

    def run_membership_workflow(self):
        """Load the selected table, check membership and fill the preview."""
        table_path = self.table_input.path()
        expression = self.variety_input.text().strip()
        if not table_path or not expression:
            QMessageBox.warning(
                self, "Error", "Please select a table file and enter a variety."
            )
            return

        try:
            config = create_toolkit_config(
                strict=not self.lenient,
                table_format="packed" if self.packed_format else "text",
            )
            table = load_groupoid_safe(
                table_path, "packed" if self.packed_format else None
            )
            if table is None:
                QMessageBox.warning(
                    self,
                    "Error",
                    "The table could not be read. Please check the console for error messages.",
                )
                return

            checker = MembershipChecker(config, logger=self.logger)
            result = checker.check_safe(table, expression)
            if result is None:
                QMessageBox.warning(
                    self,
                    "Error",
                    "Membership check failed. Please check the console for error messages.",
                )
                return

            egg_box_text = format_egg_box(table) if table.is_semigroup else None
            self.preview.show_result(result, egg_box_text)
            QMessageBox.information(
                self,
                "Done",
                f"{table.label()} {'is' if result.member else 'is not'} in {result.variety}.",
            )
        except (SemigroupToolkitError, ValueError) as e:
            QMessageBox.critical(self, "Error", f"An error occurred: {str(e)}")

    def mousePressEvent(self, event):
        if event.button() == Qt.LeftButton:
            self.oldPos = event.globalPos()

    def mouseMoveEvent(self, event):
        if event.buttons() == Qt.LeftButton:
            delta = QPoint(event.globalPos() - self.oldPos)
            self.move(self.x() + delta.x(), self.y() + delta.y())
            self.oldPos = event.globalPos()

    def closeEvent(self, event):
        event.accept()


if __name__ == "__main__":
    if len(sys.argv) > 1:
        from src.assets.cli import run

        sys.exit(run(sys.argv[1:]))

    app = QApplication(sys.argv)
    window = MainWorkflowApp()
    window.show()
    sys.exit(app.exec_())
