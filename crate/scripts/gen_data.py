#!/usr/bin/env python3
"""Regenerates the shipped evaluation dataset, replay fixtures and corpus sample.

Every replay response is written together with the verdict it was authored to
produce (`<fixture>.expected.json`). Those sidecars are the oracle the Rust
tests compare the judge against, so this script must never import or call the
Rust code.

Usage: python3 scripts/gen_data.py [output-dir]   (default: data/)
"""

import json
import os
import statistics
import sys

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data")

SCENARIOS = [
    "function_call_required",
    "multiple_functions_selection",
    "irrelevant_with_functions",
    "no_functions_available",
    "ambiguous_selection",
    "missing_required_parameters",
]


def tool(name, description, props, required):
    return {
        "name": name,
        "description": description,
        "parameters": {"type": "object", "properties": props, "required": required},
    }


def s(desc):
    return {"type": "string", "description": desc}


def n(desc):
    return {"type": "number", "description": desc}


TOOLS = {
    "get_weather": tool("get_weather", "Returns current weather for a city",
                        {"city": s("City name"), "units": s("metric or imperial")}, ["city"]),
    "get_weather_forecast": tool("get_weather_forecast", "Returns a multi-day weather forecast for a city",
                                 {"city": s("City name"), "days": n("Number of days")}, ["city", "days"]),
    "calculate_property_tax": tool("calculate_property_tax", "Calculates annual property tax for a municipality",
                                   {"assessed_value": n("Assessed value in BGN"), "municipality": s("Municipality")},
                                   ["assessed_value", "municipality"]),
    "convert_currency": tool("convert_currency", "Converts an amount between two currencies",
                             {"amount": n("Amount"), "from_currency": s("ISO code"), "to_currency": s("ISO code")},
                             ["amount", "from_currency", "to_currency"]),
    "get_exchange_rate": tool("get_exchange_rate", "Returns the exchange rate between two currencies",
                              {"base": s("ISO code"), "target": s("ISO code")}, ["base", "target"]),
    "get_train_schedule": tool("get_train_schedule", "Lists train departures between two cities",
                               {"from_city": s("Departure"), "to_city": s("Arrival"), "date": s("YYYY-MM-DD")},
                               ["from_city", "to_city", "date"]),
    "search_restaurants": tool("search_restaurants", "Searches restaurants by city and cuisine",
                               {"city": s("City"), "cuisine": s("Cuisine")}, ["city", "cuisine"]),
    "book_appointment": tool("book_appointment", "Записва час за административна услуга",
                             {"service": s("Услуга"), "date": s("Дата"), "time": s("Час")},
                             ["service", "date", "time"]),
    "check_vignette": tool("check_vignette", "Проверява валидността на електронна винетка",
                           {"plate_number": s("Регистрационен номер")}, ["plate_number"]),
    "send_email": tool("send_email", "Sends an email message",
                       {"to": s("Recipient"), "subject": s("Subject"), "body": s("Body")}, ["to", "subject", "body"]),
    "create_calendar_event": tool("create_calendar_event", "Creates a calendar event",
                                  {"title": s("Title"), "date": s("YYYY-MM-DD"), "time": s("HH:MM")},
                                  ["title", "date", "time"]),
    "get_pharmacy_on_duty": tool("get_pharmacy_on_duty", "Връща дежурните аптеки в даден град",
                                 {"city": s("Град")}, ["city"]),
    "translate_text": tool("translate_text", "Translates text to a target language",
                           {"text": s("Text"), "target_language": s("Language code")}, ["text", "target_language"]),
    "get_stock_price": tool("get_stock_price", "Returns the latest stock price for a ticker symbol",
                            {"symbol": s("Ticker")}, ["symbol"]),
    "calculate_bmi": tool("calculate_bmi", "Calculates body mass index",
                          {"weight_kg": n("Weight"), "height_cm": n("Height")}, ["weight_kg", "height_cm"]),
    "check_parcel_status": tool("check_parcel_status", "Returns delivery status for a parcel",
                                {"tracking_number": s("Tracking number")}, ["tracking_number"]),
    "get_air_quality": tool("get_air_quality", "Returns the air quality index for a city",
                            {"city": s("City")}, ["city"]),
    "get_national_olympiad_info": tool("get_national_olympiad_info", "Връща информация за national olympiad по даден subject",
                                       {"subject": s("Subject")}, ["subject"]),
}


def tools(*names):
    return [TOOLS[x] for x in names]


# (tools, query, expected_function, expected_parameters, lenient-but-correct argument variant)
CALL_REQUIRED = [
    (["get_weather"], "Какво е времето във Варна в момента?", "get_weather", {"city": "Varna"}, {"city": "Варна"}),
    (["calculate_property_tax"], "Изчисли данъка върху имот с данъчна оценка 150000 лв в община Пловдив.",
     "calculate_property_tax", {"assessed_value": 150000, "municipality": "Plovdiv"},
     {"assessed_value": "150000", "municipality": "Пловдив"}),
    (["convert_currency"], "Колко евро са 500 лева?", "convert_currency",
     {"amount": 500, "from_currency": "BGN", "to_currency": "EUR"}, {"amount": "500", "from_currency": "bgn", "to_currency": "eur"}),
    (["get_train_schedule"], "Кои влакове тръгват от София за Бургас на 2025-03-14?", "get_train_schedule",
     {"from_city": "Sofia", "to_city": "Burgas", "date": "2025-03-14"},
     {"from_city": "София", "to_city": "Бургас", "date": "2025-03-14"}),
    (["check_vignette"], "Провери винетката на кола с номер CA1234AB.", "check_vignette",
     {"plate_number": "CA1234AB"}, {"plate_number": "ca1234ab"}),
    (["get_pharmacy_on_duty"], "Кои аптеки са дежурни днес в Русе?", "get_pharmacy_on_duty",
     {"city": "Ruse"}, {"city": "Русе"}),
    (["get_stock_price"], "Каква е цената на акциите на AAPL?", "get_stock_price", {"symbol": "AAPL"}, {"symbol": "aapl"}),
    (["calculate_bmi"], "Изчисли ИТМ за човек с тегло 80 кг и ръст 180 см.", "calculate_bmi",
     {"weight_kg": 80, "height_cm": 180}, {"weight_kg": "80", "height_cm": 180.0}),
    (["check_parcel_status"], "Къде е пратката ми с номер BG123456789?", "check_parcel_status",
     {"tracking_number": "BG123456789"}, {"tracking_number": "bg123456789"}),
    (["get_air_quality"], "Какво е качеството на въздуха в Перник?", "get_air_quality", {"city": "Pernik"}, {"city": "Перник"}),
    (["translate_text"], "Преведи 'добро утро' на английски.", "translate_text",
     {"text": "добро утро", "target_language": "en"}, {"text": "Добро утро", "target_language": "EN"}),
    (["send_email"], "Изпрати имейл до ivan@example.com с тема 'Среща' и текст 'Ще закъснея'.", "send_email",
     {"to": "ivan@example.com", "subject": "Среща", "body": "Ще закъснея"},
     {"to": "ivan@example.com", "subject": "среща", "body": "Ще закъснея."}),
    (["create_calendar_event"], "Създай събитие 'Зъболекар' на 2025-04-02 в 10:30.", "create_calendar_event",
     {"title": "Зъболекар", "date": "2025-04-02", "time": "10:30"}, {"title": "Zabolekar", "date": "2025-04-02", "time": "10:30"}),
    (["book_appointment"], "Запиши ми час за лична карта на 2025-05-06 в 09:00.", "book_appointment",
     {"service": "лична карта", "date": "2025-05-06", "time": "09:00"}, {"service": "Лична карта", "date": "2025-05-06", "time": "09:00"}),
    (["search_restaurants"], "Намери италиански ресторанти в Пловдив.", "search_restaurants",
     {"city": "Plovdiv", "cuisine": "italian"}, {"city": "Пловдив", "cuisine": "Italian"}),
    (["get_exchange_rate"], "Какъв е курсът на долара спрямо лева?", "get_exchange_rate",
     {"base": "USD", "target": "BGN"}, {"base": "usd", "target": "bgn"}),
    (["get_weather"], "Вали ли сняг в Банско?", "get_weather", {"city": "Bansko"}, {"city": "Банско"}),
    (["calculate_property_tax"], "Колко е данъкът за апартамент с оценка 98500.50 лв в община Варна?",
     "calculate_property_tax", {"assessed_value": 98500.5, "municipality": "Varna"},
     {"assessed_value": "98500.50", "municipality": "Варна"}),
    (["get_air_quality"], "Замърсен ли е въздухът в София днес?", "get_air_quality", {"city": "Sofia"}, {"city": "София"}),
    (["get_stock_price"], "Покажи ми цената на MSFT.", "get_stock_price", {"symbol": "MSFT"}, {"symbol": "MSFT"}),
]

MULTI_SELECT = [
    (["get_weather", "get_stock_price", "send_email"], "Колко градуса е в Стара Загора?", "get_weather",
     {"city": "Stara Zagora"}, {"city": "Стара Загора"}),
    (["convert_currency", "get_air_quality", "calculate_bmi"], "Обърни 200 долара в лева.", "convert_currency",
     {"amount": 200, "from_currency": "USD", "to_currency": "BGN"}, {"amount": 200, "from_currency": "usd", "to_currency": "bgn"}),
    (["check_vignette", "check_parcel_status", "get_weather"], "Имам ли валидна винетка за PB7788KK?", "check_vignette",
     {"plate_number": "PB7788KK"}, {"plate_number": "pb7788kk"}),
    (["get_train_schedule", "search_restaurants", "translate_text"], "Влакове от Пловдив до Варна на 2025-06-01?",
     "get_train_schedule", {"from_city": "Plovdiv", "to_city": "Varna", "date": "2025-06-01"},
     {"from_city": "Пловдив", "to_city": "Варна", "date": "2025-06-01"}),
    (["send_email", "create_calendar_event", "get_stock_price"], "Добави 'Рожден ден на мама' на 2025-07-19 в 18:00 в календара.",
     "create_calendar_event", {"title": "Рожден ден на мама", "date": "2025-07-19", "time": "18:00"},
     {"title": "рожден ден на мама", "date": "2025-07-19", "time": "18:00"}),
    (["calculate_bmi", "get_pharmacy_on_duty", "get_weather"], "Дежурна аптека в Габрово?", "get_pharmacy_on_duty",
     {"city": "Gabrovo"}, {"city": "Габрово"}),
    (["translate_text", "send_email", "search_restaurants"], "Преведи 'благодаря' на немски.", "translate_text",
     {"text": "благодаря", "target_language": "de"}, {"text": "Благодаря", "target_language": "DE"}),
    (["get_stock_price", "get_exchange_rate", "check_parcel_status"], "Цена на акциите на TSLA?", "get_stock_price",
     {"symbol": "TSLA"}, {"symbol": "tsla"}),
    (["check_parcel_status", "check_vignette", "book_appointment"], "Проследи пратка EE998877BG.", "check_parcel_status",
     {"tracking_number": "EE998877BG"}, {"tracking_number": "ee998877bg"}),
    (["search_restaurants", "get_weather", "get_air_quality"], "Искам да хапна суши в София, какво има?", "search_restaurants",
     {"city": "Sofia", "cuisine": "sushi"}, {"city": "София", "cuisine": "Sushi"}),
    (["calculate_property_tax", "convert_currency", "calculate_bmi"], "Данък за къща с оценка 240000 лв в община Бургас.",
     "calculate_property_tax", {"assessed_value": 240000, "municipality": "Burgas"},
     {"assessed_value": "240000", "municipality": "Бургас"}),
    (["get_air_quality", "get_weather", "get_pharmacy_on_duty"], "Индекс на качеството на въздуха в Пловдив?", "get_air_quality",
     {"city": "Plovdiv"}, {"city": "Пловдив"}),
    (["book_appointment", "create_calendar_event", "send_email"], "Запиши ми час за шофьорска книжка на 2025-08-11 в 14:00.",
     "book_appointment", {"service": "шофьорска книжка", "date": "2025-08-11", "time": "14:00"},
     {"service": "Шофьорска книжка", "date": "2025-08-11", "time": "14:00"}),
    (["get_exchange_rate", "get_stock_price", "translate_text"], "Курс евро към британски паунд?", "get_exchange_rate",
     {"base": "EUR", "target": "GBP"}, {"base": "eur", "target": "gbp"}),
    (["calculate_bmi", "get_weather", "send_email"], "ИТМ при 65 кг и 170 см?", "calculate_bmi",
     {"weight_kg": 65, "height_cm": 170}, {"weight_kg": 65.0, "height_cm": "170"}),
    (["send_email", "translate_text", "create_calendar_event"], "Прати имейл на maria@example.bg, тема 'Отчет', текст 'Готов е'.",
     "send_email", {"to": "maria@example.bg", "subject": "Отчет", "body": "Готов е"},
     {"to": "maria@example.bg", "subject": "отчет", "body": "Готов е!"}),
    (["get_weather", "get_train_schedule", "check_vignette"], "Какво е времето в Шумен?", "get_weather",
     {"city": "Shumen"}, {"city": "Шумен"}),
    (["convert_currency", "get_exchange_rate", "get_stock_price"], "Превърни 1000 лева в долари.", "convert_currency",
     {"amount": 1000, "from_currency": "BGN", "to_currency": "USD"}, {"amount": "1000", "from_currency": "BGN", "to_currency": "USD"}),
    (["get_pharmacy_on_duty", "search_restaurants", "get_air_quality"], "Отворена аптека през нощта в Плевен?",
     "get_pharmacy_on_duty", {"city": "Pleven"}, {"city": "Плевен"}),
    (["check_vignette", "get_train_schedule", "get_weather"], "Влак от Русе до София на 2025-09-09.", "get_train_schedule",
     {"from_city": "Ruse", "to_city": "Sofia", "date": "2025-09-09"}, {"from_city": "Русе", "to_city": "София", "date": "2025-09-09"}),
]

AMBIGUOUS = [
    (["get_weather", "get_weather_forecast"], "Какво ще е времето в Бургас утре и вдругиден?", "get_weather_forecast",
     {"city": "Burgas", "days": 2}, {"city": "Бургас", "days": "2"}),
    (["convert_currency", "get_exchange_rate"], "Колко лева ще получа за 300 евро?", "convert_currency",
     {"amount": 300, "from_currency": "EUR", "to_currency": "BGN"}, {"amount": "300", "from_currency": "eur", "to_currency": "bgn"}),
    (["get_weather", "get_weather_forecast"], "Студено ли е навън във Видин сега?", "get_weather", {"city": "Vidin"}, {"city": "Видин"}),
    (["get_exchange_rate", "convert_currency"], "Какъв е обменният курс на швейцарския франк към лева?", "get_exchange_rate",
     {"base": "CHF", "target": "BGN"}, {"base": "chf", "target": "bgn"}),
    (["send_email", "create_calendar_event"], "Напомни ми за 'Плащане на тока' на 2025-10-01 в 09:00.", "create_calendar_event",
     {"title": "Плащане на тока", "date": "2025-10-01", "time": "09:00"}, {"title": "плащане на тока", "date": "2025-10-01", "time": "09:00"}),
    (["get_air_quality", "get_weather"], "Мога ли да бягам навън в Пловдив заради смога?", "get_air_quality",
     {"city": "Plovdiv"}, {"city": "Пловдив"}),
    (["check_parcel_status", "check_vignette"], "Статус на BG555000111?", "check_parcel_status",
     {"tracking_number": "BG555000111"}, {"tracking_number": "bg555000111"}),
    (["get_weather_forecast", "get_weather"], "Прогноза за 5 дни за Велико Търново.", "get_weather_forecast",
     {"city": "Veliko Tarnovo", "days": 5}, {"city": "Велико Търново", "days": 5.0}),
    (["book_appointment", "create_calendar_event"], "Искам час в общината за адресна регистрация на 2025-11-03 в 11:00.",
     "book_appointment", {"service": "адресна регистрация", "date": "2025-11-03", "time": "11:00"},
     {"service": "Адресна регистрация", "date": "2025-11-03", "time": "11:00"}),
    (["get_stock_price", "get_exchange_rate"], "Колко струва една акция на NVDA?", "get_stock_price", {"symbol": "NVDA"}, {"symbol": "nvda"}),
    (["translate_text", "send_email"], "Как е 'летище' на френски?", "translate_text",
     {"text": "летище", "target_language": "fr"}, {"text": "Летище", "target_language": "FR"}),
    (["search_restaurants", "get_pharmacy_on_duty"], "Къде да вечерям българска кухня в Бургас?", "search_restaurants",
     {"city": "Burgas", "cuisine": "bulgarian"}, {"city": "Бургас", "cuisine": "Bulgarian"}),
    (["convert_currency", "get_exchange_rate"], "Смени 50 паунда в евро.", "convert_currency",
     {"amount": 50, "from_currency": "GBP", "to_currency": "EUR"}, {"amount": 50, "from_currency": "gbp", "to_currency": "eur"}),
    (["get_weather_forecast", "get_weather"], "Ще вали ли през седмицата в Смолян? Дай ми 7 дни.", "get_weather_forecast",
     {"city": "Smolyan", "days": 7}, {"city": "Смолян", "days": "7"}),
    (["calculate_bmi", "get_air_quality"], "Имам наднормено тегло ли при 95 кг и 175 см?", "calculate_bmi",
     {"weight_kg": 95, "height_cm": 175}, {"weight_kg": "95", "height_cm": "175"}),
    (["get_exchange_rate", "convert_currency"], "Курс на йената към долара?", "get_exchange_rate",
     {"base": "JPY", "target": "USD"}, {"base": "jpy", "target": "usd"}),
    (["check_vignette", "check_parcel_status"], "Валидна ли е винетката на EH4455BP?", "check_vignette",
     {"plate_number": "EH4455BP"}, {"plate_number": "eh4455bp"}),
    (["get_weather", "get_weather_forecast"], "Колко е температурата в Благоевград точно сега?", "get_weather",
     {"city": "Blagoevgrad"}, {"city": "Благоевград"}),
    (["create_calendar_event", "book_appointment"], "Сложи 'Среща с екипа' на 2025-12-15 в 15:00.", "create_calendar_event",
     {"title": "Среща с екипа", "date": "2025-12-15", "time": "15:00"}, {"title": "среща с екипа", "date": "2025-12-15", "time": "15:00"}),
    (["convert_currency", "get_exchange_rate"], "Колко долара са 2500 лева?", "convert_currency",
     {"amount": 2500, "from_currency": "BGN", "to_currency": "USD"}, {"amount": "2500", "from_currency": "bgn", "to_currency": "usd"}),
]

IRRELEVANT = [
    (["get_weather"], "Кой е най-високият връх в България?", "Най-високият връх в България е Мусала (2925 м) в Рила."),
    (["convert_currency"], "Кой е написал 'Под игото'?", "'Под игото' е написан от Иван Вазов."),
    (["get_stock_price", "send_email"], "Колко е 12 по 12?", "12 по 12 е 144."),
    (["get_train_schedule"], "Коя е столицата на Франция?", "Столицата на Франция е Париж."),
    (["calculate_bmi"], "Какво е фотосинтеза?", "Фотосинтезата е процесът, при който растенията превръщат светлината в химична енергия."),
    (["search_restaurants", "get_weather"], "Кога е Освобождението на България?", "Освобождението е на 3 март 1878 г."),
    (["check_vignette"], "Колко континента има?", "Има седем континента."),
    (["translate_text"], "Кой е изобретил компютъра Атанасов-Бери?", "Джон Атанасов заедно с Клифърд Бери."),
    (["get_air_quality", "get_pharmacy_on_duty"], "Каква е химичната формула на водата?", "Формулата на водата е H2O."),
    (["send_email"], "Разкажи ми виц.", "Защо програмистите бъркат Хелоуин и Коледа? Защото OCT 31 = DEC 25."),
    (["get_exchange_rate"], "Колко е дълъг Дунав?", "Дунав е дълъг около 2850 км."),
    (["create_calendar_event"], "Кой е първият български цар?", "Симеон I е първият български владетел с титлата цар."),
    (["book_appointment", "check_vignette"], "Каква е скоростта на светлината?", "Около 299 792 км/с."),
    (["get_weather_forecast"], "Защо небето е синьо?", "Заради разсейването на Рейли."),
    (["check_parcel_status"], "Колко са планетите в Слънчевата система?", "Осем планети."),
    (["get_stock_price"], "Какво е инфлация?", "Инфлацията е общо повишаване на цените."),
    (["calculate_property_tax"], "Кой е авторът на 'Железният светилник'?", "Димитър Талев."),
    (["get_weather", "convert_currency"], "Колко е квадратният корен от 81?", "Квадратният корен от 81 е 9."),
    (["search_restaurants"], "Как се прави баница?", "Баницата се прави с кори, яйца, сирене и кисело мляко."),
    (["translate_text", "get_air_quality"], "Какъв е най-дългият ден в годината?", "Около 21 юни, лятното слънцестоене."),
]

NO_FUNCTIONS = [
    ("Кой е най-високият връх в България?", "Мусала, 2925 метра."),
    ("Какво е времето във Варна?", "Нямам достъп до актуални данни за времето."),
    ("Колко е 7 по 8?", "56."),
    ("Коя е столицата на Италия?", "Рим."),
    ("Какво означава ДДС?", "Данък добавена стойност."),
    ("Кога е основан Софийският университет?", "През 1888 г."),
    ("Изпрати имейл на шефа ми.", "Нямам възможност да изпращам имейли, но мога да помогна с текста."),
    ("Препоръчай книга.", "Препоръчвам 'Тютюн' от Димитър Димов."),
    ("Колко дни има февруари във високосна година?", "29 дни."),
    ("Какво е ИТМ?", "Индекс на телесната маса."),
    ("Какъв е курсът на еврото?", "Нямам достъп до текущи курсове."),
    ("Кой е Христо Ботев?", "Български поет и революционер."),
    ("Колко е 2 на 10-та степен?", "1024."),
    ("Коя е най-голямата река в България?", "Искър е най-дългата изцяло българска река."),
    ("Какво е машинно обучение?", "Област от изкуствения интелект."),
    ("Преведи 'куче' на английски.", "Dog."),
    ("Кой е написал 'Бай Ганьо'?", "Алеко Константинов."),
    ("Колко секунди има в час?", "3600."),
    ("Запиши ми час при лекар.", "Не мога да записвам часове, но мога да ви насоча как да го направите."),
    ("Кое е най-дълбокото езеро в България?", "Смолянските езера... всъщност най-дълбокото е Окото в Рила."),
]

MISSING = [
    (["get_weather"], "Какво е времето?", "За кой град искате прогнозата?"),
    (["calculate_property_tax"], "Изчисли ми данъка върху имота.", "Каква е данъчната оценка и в коя община е имотът?"),
    (["convert_currency"], "Обърни ми парите в евро.", "Каква сума и от коя валута да конвертирам?"),
    (["get_train_schedule"], "Кога има влак за Варна?", "От кой град и на коя дата пътувате?"),
    (["check_vignette"], "Провери ми винетката.", "Какъв е регистрационният номер на автомобила?"),
    (["send_email"], "Изпрати имейл на Петър.", "Какъв е имейл адресът, темата и текстът?"),
    (["create_calendar_event"], "Добави събитие в календара.", "Как да се казва събитието, на коя дата и в колко часа?"),
    (["book_appointment"], "Запиши ми час.", "За каква услуга, на коя дата и в колко часа?"),
    (["calculate_bmi"], "Изчисли ми ИТМ-а.", "Какви са теглото и ръстът ви?"),
    (["check_parcel_status"], "Къде ми е пратката?", "Какъв е номерът за проследяване?"),
    (["translate_text"], "Преведи това на английски.", "Кой текст да преведа?"),
    (["get_stock_price"], "Каква е цената на акцията?", "За коя компания или борсов символ?"),
    (["get_exchange_rate"], "Какъв е курсът?", "Между кои валути?"),
    (["search_restaurants"], "Намери ми ресторант.", "В кой град и каква кухня предпочитате?"),
    (["get_pharmacy_on_duty"], "Има ли дежурна аптека?", "В кой град се намирате?"),
    (["get_air_quality"], "Чист ли е въздухът?", "За кой град да проверя?"),
    (["get_weather_forecast"], "Дай ми прогнозата за времето.", "За кой град и за колко дни?"),
    (["calculate_property_tax", "convert_currency"], "Колко е данъкът за апартамент в София?", "Каква е данъчната оценка на апартамента?"),
    (["convert_currency", "get_exchange_rate"], "Колко са 100 в лева?", "От коя валута са 100-те?"),
    (["get_train_schedule", "get_weather"], "Искам влак до Бургас утре.", "От коя гара тръгвате и на коя точна дата?"),
]

# Wrong-argument variants keyed by expected function (the value is a different entity).
WRONG_ARGS = {
    "get_weather": {"city": "Lovech"},
    "get_weather_forecast": {"city": "Lovech", "days": 1},
    "calculate_property_tax": {"assessed_value": 1500, "municipality": "Sofia"},
    "convert_currency": {"amount": 5, "from_currency": "USD", "to_currency": "JPY"},
    "get_exchange_rate": {"base": "EUR", "target": "EUR"},
    "get_train_schedule": {"from_city": "Sofia", "to_city": "Sofia", "date": "2024-01-01"},
    "search_restaurants": {"city": "Lovech", "cuisine": "chinese"},
    "book_appointment": {"service": "паспорт", "date": "2024-01-01", "time": "08:00"},
    "check_vignette": {"plate_number": "X0000XX"},
    "send_email": {"to": "nobody@example.com", "subject": "x", "body": "y"},
    "create_calendar_event": {"title": "Обяд", "date": "2024-01-01", "time": "12:00"},
    "get_pharmacy_on_duty": {"city": "Lovech"},
    "translate_text": {"text": "здравей", "target_language": "es"},
    "get_stock_price": {"symbol": "GOOG"},
    "calculate_bmi": {"weight_kg": 60, "height_cm": 150},
    "check_parcel_status": {"tracking_number": "000"},
    "get_air_quality": {"city": "Lovech"},
}


def build_cases():
    cases = []

    def add(scenario, idx, tool_names, query, fn=None, params=None):
        case = {
            "id": f"{scenario[:3]}-{idx:02d}" if False else None,
            "scenario": scenario,
            "tools": tools(*tool_names),
            "query": query,
        }
        if fn is not None:
            case["expected_function"] = fn
            case["expected_parameters"] = params
        cases.append(case)

    for i, (t, q, fn, p, _) in enumerate(CALL_REQUIRED):
        add("function_call_required", i, t, q, fn, p)
    for i, (t, q, fn, p, _) in enumerate(MULTI_SELECT):
        add("multiple_functions_selection", i, t, q, fn, p)
    for i, (t, q, _) in enumerate(IRRELEVANT):
        add("irrelevant_with_functions", i, t, q)
    for i, (q, _) in enumerate(NO_FUNCTIONS):
        add("no_functions_available", i, [], q)
    for i, (t, q, fn, p, _) in enumerate(AMBIGUOUS):
        add("ambiguous_selection", i, t, q, fn, p)
    for i, (t, q, _) in enumerate(MISSING):
        add("missing_required_parameters", i, t, q)
    for k, c in enumerate(cases):
        c["id"] = f"tc-{k + 1:03d}"
    # key order: id first
    return [{"id": c["id"], **{k: v for k, v in c.items() if k != "id"}} for c in cases]


CALL_ROWS = {
    "function_call_required": CALL_REQUIRED,
    "multiple_functions_selection": MULTI_SELECT,
    "ambiguous_selection": AMBIGUOUS,
}
TEXT_ROWS = {
    "irrelevant_with_functions": [r[2] for r in IRRELEVANT],
    "no_functions_available": [r[1] for r in NO_FUNCTIONS],
    "missing_required_parameters": [r[2] for r in MISSING],
}


def fence(name, args, ticks=3, prefix="", suffix=""):
    payload = json.dumps({"name": name, "arguments": args}, ensure_ascii=False)
    bt = "`" * ticks
    return f"{prefix}{bt}tool_call\n{payload}\n{bt}{suffix}"


def respond(case, row_index, kind, style):
    """Produce a response text intended to be judged as `kind`."""
    scen = case["scenario"]
    if scen in CALL_ROWS:
        _, _, fn, params, lenient = CALL_ROWS[scen][row_index]
        if kind == "correct":
            args = lenient if style % 2 == 0 else params
            if style % 5 == 3:
                return f"<tool_call>\n{json.dumps({'name': fn, 'arguments': args}, ensure_ascii=False)}\n</tool_call>"
            return fence(fn, args, ticks=3 if style % 3 else 2,
                         prefix="Ще проверя това за вас.\n" if style % 4 == 1 else "")
        if kind == "wrong_parameters":
            return fence(fn, WRONG_ARGS[fn])
        if kind == "wrong_function":
            other = next(t["name"] for t in case["tools"] if t["name"] != fn)
            return fence(other, WRONG_ARGS.get(other, {}))
        if kind == "no_call_when_expected":
            return "Съжалявам, но не мога да помогна с тази заявка. Моля, проверете в интернет."
        if kind == "malformed_json":
            return '```tool_call\n{"name": "' + fn + '", "arguments": \n'
    else:
        text = TEXT_ROWS[scen][row_index]
        if kind == "correct":
            return text
        if kind == "unexpected_call":
            t = case["tools"][0]
            return fence(t["name"], WRONG_ARGS.get(t["name"], {}))
    raise ValueError(f"cannot produce {kind} for {scen}")


def scenario_rows(cases):
    rows = {sc: [] for sc in SCENARIOS}
    for c in cases:
        rows[c["scenario"]].append(c)
    return rows


def plan_from_errors(rows, errors_by_scenario, offset=0):
    """errors_by_scenario: {scenario: [kind, ...]} assigned to rows starting at `offset`."""
    plan = {}
    for sc in SCENARIOS:
        scen_cases = rows[sc]
        errs = errors_by_scenario.get(sc, [])
        for i, c in enumerate(scen_cases):
            j = (i - offset) % len(scen_cases)
            plan[c["id"]] = errs[j] if j < len(errs) else "correct"
    return plan


def build_fixture(cases, run_plans):
    rows = scenario_rows(cases)
    index_in_scenario = {c["id"]: rows[c["scenario"]].index(c) for c in cases}
    by_id = {c["id"]: c for c in cases}
    fixture, expected = {}, {}
    for cid in by_id:
        outs, verdicts = [], []
        for run, plan in enumerate(run_plans):
            kind = plan[cid]
            outs.append(respond(by_id[cid], index_in_scenario[cid], kind, index_in_scenario[cid] + run))
            verdicts.append(kind)
        if len(run_plans) == 1:
            fixture[cid], expected[cid] = outs[0], verdicts[0]
        else:
            fixture[cid], expected[cid] = outs, verdicts
    return fixture, expected


def tally(expected, cases, runs):
    per_run = []
    for r in range(runs):
        correct = 0
        for c in cases:
            v = expected[c["id"]]
            v = v[r] if isinstance(v, list) else v
            correct += v == "correct"
        per_run.append(100.0 * correct / len(cases))
    return per_run


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, ensure_ascii=False, indent=2)
        f.write("\n")


def gen_eval():
    cases = build_cases()
    os.makedirs(os.path.join(OUT, "eval"), exist_ok=True)
    os.makedirs(os.path.join(OUT, "fixtures"), exist_ok=True)
    with open(os.path.join(OUT, "eval", "cases.jsonl"), "w", encoding="utf-8") as f:
        for c in cases:
            f.write(json.dumps(c, ensure_ascii=False) + "\n")
    rows = scenario_rows(cases)

    # 105 of 120 correct; no unexpected calls, wrong parameters dominate.
    strong = plan_from_errors(rows, {
        "function_call_required": ["wrong_parameters"] * 2 + ["no_call_when_expected"],
        "multiple_functions_selection": ["wrong_parameters"] * 3 + ["wrong_function"],
        "ambiguous_selection": ["wrong_parameters"] * 4 + ["wrong_function"] + ["no_call_when_expected"] * 3,
    })
    # 60 of 120 correct; never calls a tool.
    base_small = plan_from_errors(rows, {
        sc: ["no_call_when_expected"] * 20
        for sc in ("function_call_required", "multiple_functions_selection", "ambiguous_selection")
    })
    # Two runs, 95 and 94 of 120 correct.
    tuned_small_errors = [
        {
            "function_call_required": ["no_call_when_expected"] * 4 + ["wrong_parameters"] * 3,
            "multiple_functions_selection": ["no_call_when_expected"] * 2 + ["wrong_parameters"] * 2,
            "irrelevant_with_functions": ["unexpected_call"] * 5,
            "ambiguous_selection": ["no_call_when_expected"] * 6 + ["wrong_parameters"] * 2 + ["wrong_function"] * 1,
            "missing_required_parameters": ["unexpected_call"],
        },
        {
            "function_call_required": ["no_call_when_expected"] * 4 + ["wrong_parameters"] * 3,
            "multiple_functions_selection": ["no_call_when_expected"] * 2 + ["wrong_parameters"] * 1 + ["wrong_function"],
            "irrelevant_with_functions": ["unexpected_call"] * 4,
            "ambiguous_selection": ["no_call_when_expected"] * 6 + ["wrong_parameters"] * 2 + ["wrong_function"] * 1,
            "missing_required_parameters": ["unexpected_call"],
        },
    ]
    tuned_small = [plan_from_errors(rows, e, offset=r * 7) for r, e in enumerate(tuned_small_errors)]

    summary = {}
    for name, plans in (("strong", [strong]), ("base-small", [base_small]), ("tuned-small", tuned_small)):
        fixture, expected = build_fixture(cases, plans)
        write_json(os.path.join(OUT, "fixtures", f"{name}.json"), fixture)
        write_json(os.path.join(OUT, "fixtures", f"{name}.expected.json"), expected)
        per_run = tally(expected, cases, len(plans))
        summary[name] = (per_run, sum(per_run) / len(per_run))
    return summary


# ---------------------------------------------------------------------------
# corpus sample

CORPUS_TOOLS = [t for t in TOOLS.values()]
EN_TOOLS = [t for t in CORPUS_TOOLS if all(ord(ch) < 0x400 for ch in t["description"])]
BG_TOOLS = [t for t in CORPUS_TOOLS if all(not ch.isalpha() or ord(ch) >= 0x400 for ch in t["description"])]
MIXED_TOOLS = [TOOLS["get_national_olympiad_info"]]


def lang_of(desc):
    latin = sum(1 for ch in desc if ch.isalpha() and ord(ch) < 0x250)
    cyr = sum(1 for ch in desc if ch.isalpha() and 0x400 <= ord(ch) <= 0x52F)
    total = sum(1 for ch in desc if ch.isalpha())
    if total and latin * 10 >= total * 9:
        return "english"
    if total and cyr * 10 >= total * 9:
        return "bulgarian"
    return "mixed"


class ToolPicker:
    """Deterministic round robin over a fixed english/bulgarian/mixed pattern."""

    def __init__(self):
        # 113 definitions planned: 98 english, 13 bulgarian, 2 mixed.
        self.pattern = []
        self.i = 0
        self.e = self.b = self.m = 0

    def take(self, k):
        out = []
        for _ in range(k):
            slot = self.i
            self.i += 1
            if slot in (40, 90):
                out.append(MIXED_TOOLS[0])
            elif slot % 9 == 4:
                out.append(BG_TOOLS[self.b % len(BG_TOOLS)])
                self.b += 1
            else:
                out.append(EN_TOOLS[self.e % len(EN_TOOLS)])
                self.e += 1
        # unique names within a block
        seen, uniq = set(), []
        for t in out:
            if t["name"] in seen:
                alt = next(x for x in EN_TOOLS if x["name"] not in seen)
                t = alt
            seen.add(t["name"])
            uniq.append(t)
        return uniq


def tools_tag(defs):
    return "<tools>" + json.dumps(defs, ensure_ascii=False) + "</tools>"


def call_tag(name, args):
    return "<tool_code>" + json.dumps({"name": name, "arguments": args}, ensure_ascii=False) + "</tool_code>"


def resp_tag(obj):
    return "<tool_response>" + json.dumps(obj, ensure_ascii=False) + "</tool_response>"


USER_QUERIES = [
    "Какво е времето в Пловдив днес?",
    "Можеш ли да ми помогнеш да изчисля данъка за апартамента си в София? Оценката е 120000 лв.",
    "Трябва ми влак от Варна до Русе в петък.",
    "Искам да проверя статуса на моята пратка, номерът е BG777111222.",
    "Колко струва една акция на Apple в момента?",
    "Преведи 'Честита Нова година' на испански.",
]
FOLLOW_UPS = ["В Пловдив.", "Номерът е CA4411KT.", "За утре, 2025-03-02.", "Сумата е 250 лева.", "Да, моля."]
MODEL_QUESTIONS = ["За кой град става дума?", "Можете ли да уточните датата?", "Каква е точната сума?"]
MODEL_ANSWERS = [
    "Готово! Ето резултата от проверката.",
    "Според данните температурата е 18 градуса и е слънчево.",
    "Данъкът за годината е 180 лв.",
    "Пратката ви е в куриерския офис и ще бъде доставена утре.",
]
REJECTIONS = [
    "Нямам подходящ инструмент за тази заявка, но мога да отговоря от общи познания.",
    "Съжалявам, наличните функции не могат да изпълнят тази задача.",
]
NO_TOOL_ANSWERS = ["Мусала е най-високият връх в България.", "Иван Вазов е автор на 'Под игото'."]


def gen_corpus():
    picker = ToolPicker()
    convs = []
    k = 0

    def user_first(ntools, q):
        defs = picker.take(ntools) if ntools else []
        return {"from": "user", "value": tools_tag(defs) + "\n" + q}, defs

    def call(defs, j):
        t = defs[j % len(defs)]
        first = next(iter(t["parameters"]["properties"]))
        return {"from": "model", "value": call_tag(t["name"], {first: "Пловдив"})}

    def tool_msg(j):
        return {"from": "tool", "value": resp_tag({"status": "ok", "result": MODEL_ANSWERS[j % 4], "id": j})}

    def model_text(lst, j):
        return {"from": "model", "value": lst[j % len(lst)]}

    def user_text(j):
        return {"from": "user", "value": FOLLOW_UPS[j % len(FOLLOW_UPS)]}

    sizes = {1: 3, 2: 9, 3: 8, 4: 12, 5: 6, 6: 5, 7: 3, 8: 2, 15: 2}
    for size, count in sizes.items():
        for c in range(count):
            k += 1
            q = USER_QUERIES[k % len(USER_QUERIES)]
            if size == 1:
                u, _ = user_first(2, q)
                msgs = [u]
            elif size == 2:
                if c < 5:
                    u, _ = user_first(2, q)
                    msgs = [u, model_text(REJECTIONS, c)]
                else:
                    u, _ = user_first(0, "Кой е най-високият връх в България?")
                    msgs = [u, model_text(NO_TOOL_ANSWERS, c)]
            elif size == 3:
                u, d = user_first(3, q)
                msgs = [u, call(d, c), tool_msg(k)]
            elif size == 4:
                if c < 10:
                    u, d = user_first(2, q)
                    msgs = [u, call(d, c), tool_msg(k), model_text(MODEL_ANSWERS, k)]
                else:
                    u, d = user_first(2, q)
                    msgs = [u, model_text(MODEL_QUESTIONS, c), user_text(c), model_text(REJECTIONS, c)]
            elif size == 5:
                u, d = user_first(2, q)
                msgs = [u, model_text(MODEL_QUESTIONS, c), user_text(c), call(d, c), tool_msg(k)]
            elif size == 6:
                u, d = user_first(3, q)
                msgs = [u, model_text(MODEL_QUESTIONS, c), user_text(c), call(d, c), tool_msg(k),
                        model_text(MODEL_ANSWERS, k)]
            elif size == 7:
                u, d = user_first(3, q)
                msgs = [u, call(d, 0), tool_msg(k), model_text(MODEL_ANSWERS, k), user_text(c), call(d, 1),
                        tool_msg(k + 1)]
            elif size == 8:
                u, d = user_first(2, q)
                msgs = [u, call(d, 0), tool_msg(k), model_text(MODEL_ANSWERS, k), user_text(c),
                        model_text(MODEL_QUESTIONS, c), user_text(c + 1), model_text(MODEL_ANSWERS, k + 1)]
            elif size == 15:
                u, d = user_first(3, q)
                msgs = [u, model_text(MODEL_QUESTIONS, c), user_text(c), call(d, 0), tool_msg(k),
                        model_text(MODEL_ANSWERS, k)]
                for r in range(3):
                    msgs += [user_text(c + r + 1), call(d, r + 1), tool_msg(k + r + 1)]
            assert len(msgs) == size, (size, len(msgs))
            convs.append(msgs)

    # interleave so file order is not sorted by size
    order = sorted(range(len(convs)), key=lambda i: (i * 37) % len(convs))
    convs = [convs[i] for i in order]

    os.makedirs(os.path.join(OUT, "corpus"), exist_ok=True)
    with open(os.path.join(OUT, "corpus", "sample.jsonl"), "w", encoding="utf-8") as f:
        for i, msgs in enumerate(convs):
            if i % 10 == 3:
                f.write(json.dumps({"conversations": msgs}, ensure_ascii=False) + "\n")
            else:
                f.write(json.dumps(msgs, ensure_ascii=False) + "\n")
    return golden_stats(convs)


def golden_stats(convs):
    def summary(xs):
        return {"min": min(xs), "max": max(xs), "mean": sum(xs) / len(xs), "median": statistics.median(xs)}

    stats = {"messages": summary([len(c) for c in convs])}
    for role in ("user", "model", "tool"):
        stats[role + "_messages"] = summary([sum(1 for m in c if m["from"] == role) for c in convs])
        lens = [len(m["value"]) for c in convs for m in c if m["from"] == role]
        stats[role + "_length"] = {"min": min(lens), "max": max(lens), "mean": sum(lens) / len(lens)}

    langs = {"english": 0, "bulgarian": 0, "mixed": 0}
    uses = rejects = clarifies = 0
    for c in convs:
        declared = False
        calls = 0
        has_tool_msg = any(m["from"] == "tool" for m in c)
        clar = False
        for m in c:
            v = m["value"]
            if m["from"] == "user" and "<tools>" in v:
                defs = json.loads(v[v.index("<tools>") + 7:v.index("</tools>")])
                declared = declared or bool(defs)
                for d in defs:
                    langs[lang_of(d["description"])] += 1
            if m["from"] == "model":
                has_call = "<tool_code>" in v
                calls += has_call
                clar = clar or ("?" in v and not has_call)
        uses += has_tool_msg or calls > 0
        rejects += declared and calls == 0 and not has_tool_msg
        clarifies += clar
    total = len(convs)
    stats["behavior"] = {"tool_usage": 100 * uses / total, "rejection": 100 * rejects / total,
                         "clarification": 100 * clarifies / total}
    ndefs = sum(langs.values())
    stats["languages"] = {k: {"count": v, "percent": 100 * v / ndefs} for k, v in langs.items()}
    return stats


if __name__ == "__main__":
    print(json.dumps(gen_eval(), indent=1))
    print(json.dumps(gen_corpus(), indent=1, ensure_ascii=False))
